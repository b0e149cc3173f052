#include "riemann/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace riemann {

bool shape_domain_contains(const SemiAxes& b, double margin)
{
    if (!(b.b1 > 0) || !(b.b2 > 0))
        return false;
    return b.b1 > b.b2 * (1 + margin) &&
           b.b2 > std::pow(b.b1, -0.5) * (1 + margin);
}

void require_shape_domain(const SemiAxes& b, double margin)
{
    if (!shape_domain_contains(b, margin))
        throw DomainError("semiaxes outside shape domain: b1=" +
                          std::to_string(b.b1) + " b2=" + std::to_string(b.b2));
}

bool triangle_contains(const ShapeCoords& xy, double margin)
{
    return xy.y > margin && xy.x > xy.y * (1 + margin) && xy.x < 1 - margin;
}

ShapeCoords to_shape_coords(const SemiAxes& b)
{
    require_shape_domain(b);
    return ShapeCoords{b.b2 / b.b1, b.b3() / b.b1};
}

SemiAxes from_shape_coords(const ShapeCoords& xy)
{
    if (!(xy.x > 0) || !(xy.y > 0) || !(xy.y < xy.x) || !(xy.x < 1))
        throw DomainError("shape coordinates outside open triangle");
    const double b1 = std::pow(xy.x * xy.y, -1.0 / 3.0);
    return SemiAxes{b1, xy.x * b1};
}

Mat3 cover_matrix(int index)
{
    Vec3 d;
    switch (index) {
    case 0: d = Vec3(1, 1, 1); break;
    case 1: d = Vec3(1, -1, -1); break;
    case 2: d = Vec3(-1, 1, -1); break;
    case 3: d = Vec3(-1, -1, 1); break;
    default: throw DomainError("cover matrix index must be 0..3");
    }
    return d.asDiagonal();
}

namespace {

bool same_pair(const MomentumPair& a, const MomentumPair& b)
{
    // Orbit elements differ only by sign flips, so exact comparison is safe.
    return a.m_l == b.m_l && a.m_r == b.m_r;
}

} // namespace

std::vector<MomentumPair> z4z2_orbit(const MomentumPair& m)
{
    std::vector<MomentumPair> orbit;
    for (int i = 0; i < 4; ++i) {
        const Mat3 r = cover_matrix(i);
        for (double s : {1.0, -1.0}) {
            MomentumPair cand{s * (r * m.m_l), s * (r * m.m_r)};
            bool found = false;
            for (const auto& o : orbit)
                if (same_pair(o, cand)) { found = true; break; }
            if (!found)
                orbit.push_back(cand);
        }
    }
    return orbit;
}

bool are_equivalent(const MomentumPair& m, const MomentumPair& n, double tol)
{
    if (tol < 0)
        throw DomainError("are_equivalent: tol must be >= 0");
    for (const auto& o : z4z2_orbit(m)) {
        const bool close = ((o.m_l - n.m_l).cwiseAbs().maxCoeff() <= tol) &&
                           ((o.m_r - n.m_r).cwiseAbs().maxCoeff() <= tol);
        if (close)
            return true;
    }
    return false;
}

} // namespace riemann
