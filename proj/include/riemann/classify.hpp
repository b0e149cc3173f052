#pragma once

#include "riemann/normalform.hpp"

namespace riemann {

/// Convexity taxonomy of the normal form; the strongest property that
/// holds is reported.  Convex implies QuasiConvex implies
/// DirectionallyQuasiConvex.
enum class StabilityTag {
    NotElliptic,
    Resonant,
    Convex,
    QuasiConvex,
    DirectionallyQuasiConvex,
    Indeterminate,
};

const char* to_string(StabilityTag tag);

struct StabilityClass {
    StabilityTag tag = StabilityTag::Indeterminate;
    int resonance_order = 0;   // set when tag == Resonant
    bool kam_nondegenerate = false;
    /// (alpha, beta) exponent pairs: (1/4,1/4) for any of the convexity
    /// classes, additionally (1,1/16) for QuasiConvex and stronger.
    std::vector<std::pair<double, double>> nekhoroshev_exponents;
    std::string diagnostic;
};

/// Number of theta samples on the asymptotic-cone ellipse.
inline constexpr int kDefaultNTheta = 101;

/// Core test against an explicit frequency vector (exposed for the
/// invariance and convention tests).
StabilityClass classify_with_frequencies(const Mat4& A, const Vec4& freq,
                                         double tol, int n_theta);

/// Classifies a constructed normal form.  tol scales the definiteness
/// and degeneracy decisions on the eigenvalues of A and its restriction.
/// If the report is not constructed, returns Resonant with the smallest
/// violated order.
///
/// The restriction plane is taken orthogonal to the positive frequency
/// vector (w1..w4).  Using the signed vector instead leaves large parts
/// of the planar families outside every convexity class and multiplies
/// the resonance-curve counts several-fold; the positive-vector test is
/// the one whose output matches the published region maps and counts.
StabilityClass classify_normal_form(const NormalFormReport& nf,
                                    double tol = 1e-9,
                                    int n_theta = kDefaultNTheta);

/// KAM nondegeneracy: |det A| > tol * max|eig(A)|^4.
bool kam_check(const NormalFormReport& nf, double tol = 1e-10);

std::vector<std::pair<double, double>> nekhoroshev_exponents(StabilityTag tag);

/// Unit vectors on the asymptotic cone x1^2 = (|a2|/a1) x2^2 +
/// (|a3|/a1) x3^2 in the eigenbasis of the restriction (exposed for the
/// cone-equation check).
Vec3 asymptotic_cone_vector(double a1, double a2abs, double a3abs,
                            double theta, int sign);

} // namespace riemann
