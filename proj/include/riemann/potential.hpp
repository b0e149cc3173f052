#pragma once

#include "riemann/geometry.hpp"
#include "riemann/jet2.hpp"

#include <array>

namespace riemann {

/// Index of one member of the parametric integral family
///   2*pi*g * int_0^inf s^n prod_k (s+a_k^2)^(-p_k-1/2) ds.
/// V(a) is the member p=(0,0,0), n=0 with an overall minus sign and the
/// C_n are the members p=(1,1,1), n=0..2.  Differentiating in a_i shifts
/// p_i up by one, which is how all derivatives of V are obtained without
/// nested finite differences.
struct IntegralIndex {
    std::array<int, 3> p{0, 0, 0};
    int n = 0;
};

/// Evaluates the family member by adaptive quadrature after the
/// compactification s = (t/(1-t))^2.  Values are memoized per (a, idx).
/// Requires a_k > 0 and n <= p1+p2+p3 (convergence).
double index_integral(const Vec3& a, const IntegralIndex& idx, double g = 1.0);

/// C_n(x,y,z), n = 0,1,2.
double cn(const Vec3& a, int n, double g = 1.0);

/// Self-gravitational potential of the ellipsoid with semiaxes a (not
/// restricted to unit volume).
double potential_v_axes(const Vec3& a, double g = 1.0);

/// V(b1, b2, 1/(b1 b2)) by quadrature.
double potential_v(const SemiAxes& b, double g = 1.0);

/// Closed form of V through the incomplete elliptic integral of the
/// first kind (Carlson R_F), used as an independent cross-check of the
/// quadrature path.
double potential_v_elliptic(const SemiAxes& b, double g = 1.0);

/// Carlson symmetric elliptic integral R_F(x,y,z).
double carlson_rf(double x, double y, double z);

/// Partial derivatives of V with respect to (b1,b2) up to total order
/// max_order <= 4, computed by the exact index-shift rule composed with
/// the volume constraint a = (b1, b2, 1/(b1 b2)).
class PotentialDerivatives {
public:
    PotentialDerivatives(Jet2 taylor, int max_order)
        : taylor_(taylor), max_order_(max_order) {}

    /// d^(k1+k2) V / db1^k1 db2^k2 at the base point; k1+k2 <= max_order.
    double d(int k1, int k2) const;

    /// Taylor jet of V in the offsets (db1, db2); coefficients above
    /// max_order are not valid.
    const Jet2& taylor() const { return taylor_; }

    int max_order() const { return max_order_; }

private:
    Jet2 taylor_;
    int max_order_;
};

PotentialDerivatives potential_derivatives(const SemiAxes& b,
                                           int max_order = 4, double g = 1.0);

/// Clears the global memoization cache (mainly for cache-behavior tests).
void clear_integral_cache();

} // namespace riemann
