#pragma once

#include "riemann/families.hpp"
#include "riemann/jet2.hpp"

#include <complex>
#include <vector>

namespace riemann {

/// Mass matrices of the reduced kinetic energy.  K acts on the shape
/// momenta c, the 6x6 block matrix [[J1,J2],[J2,J1]] on (m_l,m_r).
/// Entries blow up as any two semiaxes coincide.
struct MassMatrices {
    Mat2 K;
    Vec3 J1; // diagonals
    Vec3 J2;

    Mat6 J() const;
};

MassMatrices mass_matrices(const SemiAxes& b);

/// Same entries as truncated Taylor expansions in (db1, db2), used for
/// the analytic Hessian and the quartic Taylor model.
struct MassMatrixJets {
    Jet2 K[2][2];
    Jet2 J1[3];
    Jet2 J2[3];
};

MassMatrixJets mass_matrix_jets(const SemiAxes& b);

/// Reduced Hamiltonian restricted to c = 0 as a function of (b, m):
/// (1/2) m.J(b)m + V(b).  Critical points of this map are the equilibria.
double hamiltonian_tilde(const SemiAxes& b, const MomentumPair& m,
                         double g = 1.0);

/// Symplectic disk chart of the momentum sphere of radius rho centered
/// at `center`.  frame column 3 is center/rho; column 1 is the
/// distinguished principal axis that makes the Hessian blocks of the
/// reduced Hamiltonian vanish.
struct PoincareChart {
    Vec3 center;
    double rho = 0;
    Mat3 frame;
};

PoincareChart make_poincare_chart(const Vec3& center, int axis);

/// m = frame * mtilde_rho(q,p); requires q^2+p^2 < 2 rho.  This is the
/// disk parametrization whose pullback of the sphere area term is
/// dp ^ dq.
Vec3 poincare_embed(const PoincareChart& chart, double q, double p);
Vec3 chart_dq(const PoincareChart& chart, double q, double p);
Vec3 chart_dp(const PoincareChart& chart, double q, double p);

/// Oppositely oriented disk variables (q -> -q), whose pullback is the
/// canonical dq ^ dp.  All dynamics, Hessians and Taylor models use this
/// orientation so that the chart-coordinate structure matrix is exactly
/// diag(J4, J4); with the dp ^ dq orientation the sphere sector would
/// carry the opposite sign and the cubic terms of the Hamiltonian would
/// belong to the time-reversed flow.
Vec3 chart_embed(const PoincareChart& chart, double q, double p);
Vec3 chart_embed_dq(const PoincareChart& chart, double q, double p);
Vec3 chart_embed_dp(const PoincareChart& chart, double q, double p);

/// Index (0,1,2) of the principal axis used as the first frame column:
/// e1 for the S types, e2 for I and II, e3 for III.
int distinguished_axis(EllipsoidType type);

struct ChartPair {
    PoincareChart left;
    PoincareChart right;
};

ChartPair equilibrium_charts(const EquilibriumPoint& e);

/// Reduced Hamiltonian in the chart coordinates centered at e:
/// (1/2) c.K(b*+db)c + (1/2) M(q,p).J(b*+db)M(q,p) + V(b*+db).
double reduced_hamiltonian(const EquilibriumPoint& e, const Vec2& db,
                           const Vec2& c, const Vec2& q, const Vec2& p);

/// Six-dimensional variant for the irrotational case (one momentum
/// zero): (1/2) c.Kc + (1/2) m_l.J1 m_l + V with a single chart.
double reduced_hamiltonian_irrotational(const SemiAxes& b, const Vec2& c,
                                        const PoincareChart& chart, double q,
                                        double p, double g = 1.0);

/// Coordinate ordering is xi = (b1, b2, c1, c2, q1, q2, p1, p2).
/// The structure matrix is J8 = diag(J4, J4) with J4 = [[0,I],[-I,0]].
Mat8 symplectic_structure();

struct HessianReport {
    Mat8 hessian;
    /// Largest entry (relative to scale) over the blocks required to
    /// vanish: H_cb, H_cq, H_cp, H_bp, H_qp, H_cc-K, and H_bq for S types.
    double block_residual = 0;
    double scale = 0;
};

/// Analytic Hessian of the reduced Hamiltonian at the equilibrium.
/// Throws if the required zero blocks exceed 1e-9 * scale, which signals
/// a wrong distinguished-axis choice.  frame_axis overrides the default
/// axis (used by the frame-mutation test).
HessianReport hessian_at_equilibrium(const EquilibriumPoint& e,
                                     int frame_axis = -1);

struct LinearizationReport {
    Mat8 hessian;
    Mat8 X;
    Eigen::Matrix<std::complex<double>, 8, 1> eigenvalues;
    bool elliptic = false;
    int zero_modes = 0;
    /// Set when some |Re lambda| sits within 10x of the ellipticity
    /// threshold; verdicts this close to the cut are boundary-fragile.
    bool margin_flag = false;
    double tol_ell = 0;
};

/// Default threshold under which an eigenvalue counts as purely
/// imaginary: |Re| <= tol * max(1, |lambda|).
inline constexpr double kEllipticityTol = 1e-7;

LinearizationReport linearize(const EquilibriumPoint& e,
                              double tol_ell = kEllipticityTol);

/// Multiset distance between the spectrum and its image under
/// lambda -> -lambda and lambda -> conj(lambda); small for a genuine
/// Hamiltonian matrix.
double spectrum_symmetry_residual(
    const Eigen::Matrix<std::complex<double>, 8, 1>& eigenvalues);

struct Trajectory {
    std::vector<double> times;
    std::vector<Vec8> states;
    bool completed = true;       // false if the flow left the chart domain
    double energy_drift = 0;     // max relative drift of H along the flow
    double max_offset = 0;       // max |state - initial| (inf norm)
    int steps = 0;
};

/// Verification integrator for the reduced flow: 4-stage Gauss-Legendre
/// collocation (order 8, symplectic), adaptive by step doubling.  `dt`
/// is the initial and maximal step.
Trajectory integrate_reduced_flow(const EquilibriumPoint& e,
                                  const Vec8& initial_offset, double T,
                                  double dt, double tol = 1e-12);

} // namespace riemann
