#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace riemann {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat8 = Eigen::Matrix<double, 8, 8>;

/// Thrown when an argument leaves the domain of validity of an operation.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Margin keeping shapes strictly inside the domain, away from the
/// singular boundaries b1=b2 and b2=b3 where the momentum mass matrix
/// blows up.
inline constexpr double kDomainMargin = 1e-10;

/// First two semiaxes (b1,b2) of a unit-volume ellipsoid.  The third is
/// never stored: b3 = 1/(b1*b2) always, so the volume constraint cannot
/// drift.
struct SemiAxes {
    double b1 = 0;
    double b2 = 0;

    double b3() const { return 1.0 / (b1 * b2); }
    Vec3 axes() const { return Vec3(b1, b2, b3()); }
};

/// (x,y) = (b2/b1, b3/b1); maps the unbounded shape domain onto the open
/// triangle 0 < y < x < 1.
struct ShapeCoords {
    double x = 0;
    double y = 0;
};

/// Momentum pair: m_l is angular-momentum-like, m_r circulation-like.
struct MomentumPair {
    Vec3 m_l = Vec3::Zero();
    Vec3 m_r = Vec3::Zero();
};

/// True iff b1 > b2 > b1^(-1/2) with strict margin.
bool shape_domain_contains(const SemiAxes& b, double margin = kDomainMargin);

/// Throws DomainError unless shape_domain_contains(b, margin).
void require_shape_domain(const SemiAxes& b, double margin = kDomainMargin);

bool triangle_contains(const ShapeCoords& xy, double margin = kDomainMargin);

ShapeCoords to_shape_coords(const SemiAxes& b);
SemiAxes from_shape_coords(const ShapeCoords& xy);

/// Diagonal orthogonal matrices R_0..R_3 of the four-to-one covering.
/// R_0 = 1, R_1 = diag(1,-1,-1), R_2 = diag(-1,1,-1), R_3 = diag(-1,-1,1).
Mat3 cover_matrix(int index);

/// Orbit of m under the discrete symmetries m -> +-R_i m (R_i applied to
/// both components).  Duplicates removed; size is 8, 4, 2, or 1 for the
/// degenerate zero momentum.
std::vector<MomentumPair> z4z2_orbit(const MomentumPair& m);

/// True iff n lies within tol (component-wise) of some element of the
/// orbit of m.
bool are_equivalent(const MomentumPair& m, const MomentumPair& n, double tol);

} // namespace riemann
