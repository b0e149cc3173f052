#include "riemann/potential.hpp"
#include "helpers.hpp"

#include <doctest.h>
#include <cmath>
#include <random>

using namespace riemann;

namespace {

/// Independent quadrature scheme for the cross-check: adaptive Simpson
/// on the substitution s = tan^2(theta).
double simpson_rec(const std::function<double(double)>& f, double a, double b,
                   double fa, double fm, double fb, double whole, double tol,
                   int depth)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15 * tol)
        return left + right + (left + right - whole) / 15;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double cn_simpson(const Vec3& a, int n, double g)
{
    const auto f = [&](double theta) {
        const double t = std::tan(theta);
        const double s = t * t;
        double v = 1;
        for (int k = 0; k < 3; ++k)
            v *= std::pow(s + a[k] * a[k], -1.5);
        for (int q = 0; q < n; ++q)
            v *= s;
        const double sec2 = 1 + t * t;
        return v * 2 * t * sec2;
    };
    const double lo = 1e-9, hi = M_PI / 2 - 1e-9;
    const double m = 0.5 * (lo + hi);
    const double whole =
        (hi - lo) / 6 * (f(lo) + 4 * f(m) + f(hi));
    return 2 * M_PI * g *
           simpson_rec(f, lo, hi, f(lo), f(m), f(hi), whole, 1e-12, 40);
}

} // namespace

TEST_SUITE_BEGIN("potential");

TEST_CASE("closed forms at the sphere")
{
    const double g = 1.0;
    // int_0^inf (1+s)^(-3/2) ds = 2
    CHECK(potential_v_axes(Vec3(1, 1, 1), g) ==
          doctest::Approx(-4 * M_PI * g).epsilon(1e-12));
    // int_0^inf (1+s)^(-9/2) ds = 2/7
    CHECK(cn(Vec3(1, 1, 1), 0, g) ==
          doctest::Approx(4 * M_PI * g / 7).epsilon(1e-12));
    // int_0^inf s (1+s)^(-9/2) ds = B(2, 5/2) = 4/35
    CHECK(cn(Vec3(1, 1, 1), 1, g) ==
          doctest::Approx(8 * M_PI * g / 35).epsilon(1e-12));
}

TEST_CASE("index integral guards")
{
    CHECK_THROWS_AS(index_integral(Vec3(1, -1, 1), {}), DomainError);
    // n > p1+p2+p3 diverges
    CHECK_THROWS_AS(index_integral(Vec3(1, 1, 1),
                                   IntegralIndex{{0, 0, 0}, 1}),
                    DomainError);
    CHECK_THROWS_AS(cn(Vec3(1, 1, 1), 3), DomainError);
}

TEST_CASE("C_n symmetric under permutations")
{
    const Vec3 a(1.7, 0.9, 0.65);
    for (int n = 0; n <= 2; ++n) {
        const double ref = cn(a, n);
        CHECK(cn(Vec3(a[1], a[0], a[2]), n) == doctest::Approx(ref).epsilon(1e-12));
        CHECK(cn(Vec3(a[2], a[1], a[0]), n) == doctest::Approx(ref).epsilon(1e-12));
    }
    const double vref = potential_v_axes(a);
    CHECK(potential_v_axes(Vec3(a[2], a[0], a[1])) ==
          doctest::Approx(vref).epsilon(1e-12));
}

TEST_CASE("cross-scheme quadrature oracle for C_2")
{
    const Vec3 a(2.0, 1.0, 0.5);
    const double gk = cn(a, 2);
    const double simpson = cn_simpson(a, 2, 1.0);
    CHECK(std::abs(gk - simpson) <= 1e-7 * std::abs(gk));
}

TEST_CASE("quadrature vs elliptic closed form")
{
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> uni(0, 1);
    int tested = 0;
    while (tested < 20) {
        const double x = uni(rng), y = uni(rng) * x;
        if (!triangle_contains(ShapeCoords{x, y}, 1e-2))
            continue;
        const SemiAxes b = from_shape_coords({x, y});
        const double vq = potential_v(b), ve = potential_v_elliptic(b);
        CHECK(std::abs(vq - ve) <= 1e-10 * std::abs(vq));
        ++tested;
    }
}

TEST_CASE("V is negative and increases toward zero on degeneration")
{
    const SemiAxes mid = from_shape_coords({0.6, 0.3});
    const SemiAxes thin = from_shape_coords({0.6, 0.02});
    CHECK(potential_v(mid) < 0);
    CHECK(potential_v(thin) < 0);
    CHECK(potential_v(thin) > potential_v(mid));
}

TEST_CASE("derivatives match finite differences at random points")
{
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> uni(0, 1);
    int tested = 0;
    double worst[5] = {0, 0, 0, 0, 0};
    while (tested < 20) {
        const double x = uni(rng), y = uni(rng) * x;
        if (!triangle_contains(ShapeCoords{x, y}, 2e-2))
            continue;
        const SemiAxes b = from_shape_coords({x, y});
        // widest FD stencil must stay inside the shape domain
        const double reach = 2 * 8e-3;
        if (!shape_domain_contains(SemiAxes{b.b1 - reach, b.b2 + reach}) ||
            !shape_domain_contains(SemiAxes{b.b1 + reach, b.b2 - reach}))
            continue;
        const PotentialDerivatives pd = potential_derivatives(b, 4);
        // directional FD of order k along db1 and db2 alternately, with
        // one Richardson step to kill the h^2 truncation term
        for (int order = 1; order <= 4; ++order) {
            for (int axis = 0; axis < 2; ++axis) {
                auto vat = [&](double t) {
                    SemiAxes bb = b;
                    (axis == 0 ? bb.b1 : bb.b2) += t;
                    return potential_v(bb);
                };
                auto stencil = [&](double h) {
                    switch (order) {
                    case 1: return (vat(h) - vat(-h)) / (2 * h);
                    case 2:
                        return (vat(h) - 2 * vat(0) + vat(-h)) / (h * h);
                    case 3:
                        return (vat(2 * h) - 2 * vat(h) + 2 * vat(-h) -
                                vat(-2 * h)) /
                               (2 * h * h * h);
                    default:
                        return (vat(2 * h) - 4 * vat(h) + 6 * vat(0) -
                                4 * vat(-h) + vat(-2 * h)) /
                               (h * h * h * h);
                    }
                };
                const double h = order <= 2 ? 2e-4 : 8e-3;
                const double fd = (4 * stencil(h / 2) - stencil(h)) / 3;
                const double exact =
                    axis == 0 ? pd.d(order, 0) : pd.d(0, order);
                const double rel =
                    std::abs(fd - exact) / std::max(1.0, std::abs(exact));
                worst[order] = std::max(worst[order], rel);
            }
        }
        ++tested;
    }
    CHECK(worst[1] <= 1e-6);
    CHECK(worst[2] <= 1e-6);
    CHECK(worst[3] <= 1e-6);
    CHECK(worst[4] <= 1e-6);
}

TEST_CASE("mixed partials are symmetric")
{
    // The term-list rule produces one coefficient per multi-index, so the
    // symmetry check is on the jet against a transposed FD stencil.
    // Independent route: apply the index-shift rule and the chain rule
    // through a3 = 1/(b1 b2) by hand from public index integrals.
    const SemiAxes b = from_shape_coords({0.7, 0.35});
    const PotentialDerivatives pd = potential_derivatives(b, 2);
    const Vec3 a = b.axes();
    auto ii = [&](int p1, int p2, int p3) {
        return index_integral(a, IntegralIndex{{p1, p2, p3}, 0});
    };
    auto v1 = [&](int i) { // dV/da_i
        int p[3] = {0, 0, 0};
        p[i] = 1;
        return a[i] * ii(p[0], p[1], p[2]);
    };
    auto v2 = [&](int i, int j) { // d2V/da_i da_j
        if (i == j) {
            int p[3] = {0, 0, 0};
            p[i] = 1;
            const double first = ii(p[0], p[1], p[2]);
            p[i] = 2;
            return first - 3 * a[i] * a[i] * ii(p[0], p[1], p[2]);
        }
        int p[3] = {0, 0, 0};
        p[i] += 1;
        p[j] += 1;
        return -a[i] * a[j] * ii(p[0], p[1], p[2]);
    };
    const double da3_db1 = -a[2] / b.b1, da3_db2 = -a[2] / b.b2;
    const double d2a3 = a[2] / (b.b1 * b.b2);
    const double mixed = v2(0, 1) + v2(0, 2) * da3_db2 +
                         (v2(2, 1) + v2(2, 2) * da3_db2) * da3_db1 +
                         v1(2) * d2a3;
    // both differentiation orders collapse to the same symmetric value
    const double mixed_swapped = v2(1, 0) + v2(1, 2) * da3_db1 +
                                 (v2(2, 0) + v2(2, 2) * da3_db1) * da3_db2 +
                                 v1(2) * d2a3;
    CHECK(std::abs(mixed - mixed_swapped) <=
          1e-11 * std::max(1.0, std::abs(mixed)));
    CHECK(std::abs(pd.d(1, 1) - mixed) <=
          1e-11 * std::max(1.0, std::abs(mixed)));
}

TEST_CASE("everything scales linearly in g")
{
    const SemiAxes b = from_shape_coords({0.55, 0.22});
    CHECK(potential_v(b, 3.0) == doctest::Approx(3 * potential_v(b, 1.0)));
    CHECK(cn(b.axes(), 1, 0.5) == doctest::Approx(0.5 * cn(b.axes(), 1, 1.0)));
    const PotentialDerivatives p1 = potential_derivatives(b, 2, 1.0);
    const PotentialDerivatives p2 = potential_derivatives(b, 2, 2.0);
    CHECK(p2.d(1, 1) == doctest::Approx(2 * p1.d(1, 1)).epsilon(1e-11));
}

TEST_CASE("derivative order guard")
{
    const SemiAxes b = from_shape_coords({0.6, 0.3});
    const PotentialDerivatives pd = potential_derivatives(b, 2);
    CHECK_THROWS_AS(pd.d(2, 1), DomainError);
    CHECK_THROWS_AS(potential_derivatives(b, 5), DomainError);
}

TEST_CASE("memoization returns identical values")
{
    const Vec3 a(1.3, 0.8, 0.96);
    clear_integral_cache();
    const double cold = cn(a, 2);
    const double warm = cn(a, 2);
    CHECK(cold == warm);
}

TEST_SUITE_END();
