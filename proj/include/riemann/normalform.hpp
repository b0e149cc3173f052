#pragma once

#include "riemann/reduced.hpp"
#include "riemann/series.hpp"

#include <optional>

namespace riemann {

/// Output of the symplectic diagonalization of H2.  T maps the
/// diagonalizing coordinates Xi = (B1,B2,C1,C2,Q1,Q2,P1,P2) to the chart
/// coordinates xi = T Xi; its columns are the gamma-normalized
/// eigenvector parts.  Omega = (s1 w1, ..., s4 w4) is the signed
/// frequency vector.
struct FrequencyData {
    Vec4 omega;                    // w_j > 0, mode order as recorded
    std::array<int, 4> signs{};    // s_j = sign(Gamma_j)
    Vec4 Omega;
    Vec4 Gamma;
    Mat8 T;
    std::array<int, 4> permutation{}; // mode -> position ordering applied
};

struct ResonanceHit {
    ResonanceVec nu;
    int order = 0;
    double value = 0;
};

struct NormalFormReport {
    FrequencyData freq;
    Mat4 A = Mat4::Zero();       // H''_4(I) = (1/2) I.A I
    std::vector<ResonanceHit> resonances_hit;
    bool constructed = false;

    // Diagnostics, all relative to the natural scale of each check.
    double symplectic_residual = 0;   // |T' J8 T - J8|
    double h2_form_residual = 0;      // off-pattern entries of H2 in U
    double degree1_residual = 0;      // Taylor gradient at the equilibrium
    double homological_residual = 0;  // |{H2,chi1} - (H3 - <H3>)| / |H3|
    double reality_residual = 0;      // hermitian check on H3, H4

    std::set<ResonanceVec> spectrum3; // Sp H3
    std::set<ResonanceVec> spectrum4; // Sp H'_4 \ {0}
};

/// Default resonance tolerance for the construction: 1e-6 |Omega|.
double default_res_tol(const Vec4& Omega);

/// Symplectic diagonalization of the quadratic part.  For S types the
/// eigenproblem factorizes into the (b,c) and (q,p) blocks; modes from
/// the first block take positions 1,2.  Order-one resonances are always
/// rejected; order-two only within the checked set (all pairs for R
/// types, (1,+-1,0,0) and (0,0,1,+-1) for S types).
FrequencyData symplectic_diagonalize(const LinearizationReport& lin,
                                     EllipsoidType type, double res_tol);

struct TaylorExpansion {
    TruncatedSeries series;   // degrees 2..4 in the chart offsets
    double degree1_residual = 0;
    double scale = 0;
};

/// Degree-4 Taylor model of the reduced Hamiltonian in the chart
/// coordinates (b, c, q, p) centered at the equilibrium; constant
/// dropped, degree-1 part measured and dropped.
TaylorExpansion taylor_hamiltonian(const EquilibriumPoint& e);

/// The unitary-symplectic change Xi = Sigma U to complex coordinates
/// U = (W1..W4, Z1..Z4).
Eigen::Matrix<cdouble, 8, 8> sigma_matrix();

/// Substitutes xi = T Sigma U into a series in the chart coordinates.
TruncatedSeries complexify(const TruncatedSeries& series_xi, const Mat8& T);

/// Full order-4 Birkhoff pipeline: diagonalize, expand, complexify,
/// first Lie transform chi1 = S_Omega(H3), then H'_4 = (1/2){chi1,H3}+H4,
/// the order-4 resonance test, and A from the average H''_4.
/// res_tol < 0 selects default_res_tol(Omega).  Requires an elliptic
/// equilibrium; resonances are reported in the result, not thrown.
NormalFormReport birkhoff_order4(const EquilibriumPoint& e,
                                 double res_tol = -1);

/// Deterministic text form of a report, for golden-file tests.
std::string to_text(const NormalFormReport& report);

} // namespace riemann
