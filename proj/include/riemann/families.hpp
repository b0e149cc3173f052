#pragma once

#include "riemann/geometry.hpp"

namespace riemann {

/// The five families of asymmetric relative equilibria.  For S2 and S3
/// both momenta are parallel to the middle (resp. shortest) principal
/// axis; for I, II, III they lie in a principal plane containing the
/// longest axis.
enum class EllipsoidType { S2, S3, I, II, III };

/// Which of the two momentum assignments the point carries:
/// PlusMinus means (m_l, m_r) = (mu+, mu-).  The swapped branch is the
/// adjoint (transposed) solution.
enum class Branch { PlusMinus, MinusPlus };

enum class Parallelism { Coparallel, Counterparallel, Irrotational, Planar };

const char* to_string(EllipsoidType t);
EllipsoidType ellipsoid_type_from_string(const std::string& s);

/// Scalar maps whose zero sets bound the existence regions.  Argument
/// orders follow the defining formulas; the per-type calling patterns are
/// frozen in region_contains and momenta.
double gs_plus(double x, double y, double z, double g = 1.0);
double gs_minus(double x, double y, double z, double g = 1.0);
double gtilde(double x, double y, double z, double g = 1.0);
double dfun(double x, double y, double z);
double gr_plus(double x, double y, double z, double g = 1.0);
double gr_minus(double x, double y, double z, double g = 1.0);

/// N^tau_± = (sqrt(G+) ± sqrt(G-))/2 with radicands clipped to zero when
/// within -1e-12 of it (boundary roundoff); larger negativity throws.
double ns_pm(double x, double y, double z, int sign, double g = 1.0);
double nr_pm(double x, double y, double z, int sign, double g = 1.0);

/// Membership in the existence region of the given type, boundary
/// inclusive where the defining inequality is non-strict.
bool region_contains(EllipsoidType type, const SemiAxes& b, double g = 1.0);

/// Momentum pair of the equilibrium with the given semiaxes, per family
/// formulas.  Requires region_contains(type, b).
MomentumPair momenta(EllipsoidType type, const SemiAxes& b, Branch branch,
                     double g = 1.0);

/// A constructed equilibrium of the reduced system; c = 0 always.
struct EquilibriumPoint {
    SemiAxes b;
    EllipsoidType type;
    Branch branch;
    MomentumPair M;
    Vec2 c = Vec2::Zero();
    double g = 1.0;
};

EquilibriumPoint make_equilibrium(EllipsoidType type, const SemiAxes& b,
                                  Branch branch = Branch::PlusMinus,
                                  double g = 1.0);

/// Residuals of the critical-point conditions: the finite-difference
/// gradient of the reduced Hamiltonian in b, and the exact torque
/// m x grad_m.  Both must be small for a genuine equilibrium; this is a
/// diagnostic used as the construction oracle.
struct CriticalPointResidual {
    double grad_b_norm = 0;
    double torque_norm = 0;
};

CriticalPointResidual critical_point_residual(const EquilibriumPoint& e,
                                              double fd_step = 1e-5);

Parallelism classify_parallelism(const EquilibriumPoint& e);

/// Zero-pressure overlay D(b1,b3,b2) C_0 + 6 b2^2 C_1 + 3 C_2 (plot aid
/// only; the C_n are symmetric in their arguments).
double zero_pressure(const SemiAxes& b, double g = 1.0);

} // namespace riemann
