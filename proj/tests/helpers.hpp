#pragma once

#include "riemann/families.hpp"

#include <random>
#include <vector>

namespace riemann::testing {

/// Deterministic interior points of a region, away from boundaries so
/// finite-difference stencils stay inside.
inline std::vector<SemiAxes> region_points(EllipsoidType type, size_t count,
                                           double g = 1.0,
                                           uint32_t seed = 31337)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(0, 1);
    std::vector<SemiAxes> out;
    for (int tries = 0; tries < 1000000 && out.size() < count; ++tries) {
        const double x = uni(rng), y = uni(rng) * x;
        if (!triangle_contains(ShapeCoords{x, y}, 5e-3))
            continue;
        bool interior = true;
        for (double dx : {-8e-3, 0.0, 8e-3}) {
            for (double dy : {-8e-3, 0.0, 8e-3}) {
                try {
                    ShapeCoords probe{x + dx, y + dy};
                    if (!triangle_contains(probe, 1e-6) ||
                        !region_contains(type, from_shape_coords(probe), g))
                        interior = false;
                } catch (const std::exception&) {
                    interior = false;
                }
                if (!interior)
                    break;
            }
            if (!interior)
                break;
        }
        if (interior)
            out.push_back(from_shape_coords(ShapeCoords{x, y}));
    }
    return out;
}

inline const EllipsoidType kAllTypes[] = {EllipsoidType::S2, EllipsoidType::S3,
                                          EllipsoidType::I, EllipsoidType::II,
                                          EllipsoidType::III};

/// One known elliptic, nonresonant point per type (mid-region where the
/// whole pipeline succeeds).
inline SemiAxes elliptic_point(EllipsoidType t)
{
    switch (t) {
    case EllipsoidType::S2: return from_shape_coords({0.52, 0.40});
    case EllipsoidType::S3: return from_shape_coords({0.60, 0.30});
    case EllipsoidType::I: return from_shape_coords({0.90, 0.60});
    case EllipsoidType::II: return from_shape_coords({0.04, 0.033});
    case EllipsoidType::III: return from_shape_coords({0.08, 0.04});
    }
    return SemiAxes{};
}

} // namespace riemann::testing
