#include "riemann/reduced.hpp"
#include "riemann/potential.hpp"
#include "helpers.hpp"

#include <doctest.h>
#include <cmath>
#include <random>

using namespace riemann;
using namespace riemann::testing;

TEST_SUITE_BEGIN("reduced");

TEST_CASE("mass matrices: positivity, symmetry, singularity guard")
{
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> uni(0, 1);
    int tested = 0;
    while (tested < 100) {
        const double x = uni(rng), y = uni(rng) * x;
        if (!triangle_contains(ShapeCoords{x, y}, 1e-2))
            continue;
        const MassMatrices m = mass_matrices(from_shape_coords({x, y}));
        CHECK(m.J1.minCoeff() > 0);
        CHECK(m.J2.minCoeff() > 0);
        CHECK(m.K.determinant() > 0);
        CHECK(m.K(0, 1) == m.K(1, 0));
        CHECK((m.J() - m.J().transpose()).norm() == 0);
        ++tested;
    }
    // b1 -> b2 makes (b1^2 - b2^2) vanish.
    CHECK_THROWS_AS(mass_matrices(SemiAxes{1.1, 1.1 - 1e-12}), DomainError);
}

TEST_CASE("K is the inverse of the constrained shape metric")
{
    // Kinetic energy (1/2)|dA/dt|^2 on the unit-volume constraint gives
    // the metric M = I + b3^2 outer([1/b1,1/b2]); K must be its inverse.
    for (const SemiAxes& b : region_points(EllipsoidType::S3, 5)) {
        const double b3 = b.b3();
        Mat2 metric;
        metric << 1 + b3 * b3 / (b.b1 * b.b1), b3 * b3 / (b.b1 * b.b2),
            b3 * b3 / (b.b1 * b.b2), 1 + b3 * b3 / (b.b2 * b.b2);
        const MassMatrices m = mass_matrices(b);
        CHECK((m.K * metric - Mat2::Identity()).cwiseAbs().maxCoeff() <=
              1e-12);
    }
}

TEST_CASE("mass matrix jets reproduce values and derivatives")
{
    const SemiAxes b = from_shape_coords({0.7, 0.4});
    const MassMatrixJets jets = mass_matrix_jets(b);
    const MassMatrices m0 = mass_matrices(b);
    CHECK(jets.K[0][1].value() == doctest::Approx(m0.K(0, 1)).epsilon(1e-13));
    const double h = 1e-5;
    const MassMatrices mp = mass_matrices(SemiAxes{b.b1 + h, b.b2});
    const MassMatrices mm = mass_matrices(SemiAxes{b.b1 - h, b.b2});
    const double fd = (mp.J1[2] - mm.J1[2]) / (2 * h);
    CHECK(jets.J1[2].derivative(1, 0) == doctest::Approx(fd).epsilon(1e-7));
}

TEST_CASE("poincare chart basics")
{
    const Vec3 center(0.6, 0.0, 0.8);
    const PoincareChart chart = make_poincare_chart(center, 1);
    CHECK((chart.frame * chart.frame.transpose() - Mat3::Identity())
              .cwiseAbs()
              .maxCoeff() <= 1e-14);
    CHECK(chart.frame.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    // chart center
    CHECK((poincare_embed(chart, 0, 0) - center).norm() <= 1e-14);
    CHECK((chart_embed(chart, 0, 0) - center).norm() <= 1e-14);
    // norm preservation
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> uni(-1, 1);
    for (int k = 0; k < 100; ++k) {
        const double q = uni(rng), p = uni(rng);
        if (q * q + p * p >= 2 * chart.rho)
            continue;
        CHECK(poincare_embed(chart, q, p).norm() ==
              doctest::Approx(chart.rho).epsilon(1e-13));
        CHECK(chart_embed(chart, q, p).norm() ==
              doctest::Approx(chart.rho).epsilon(1e-13));
    }
    CHECK_THROWS_AS(poincare_embed(chart, 2, 2), DomainError);
    CHECK_THROWS_AS(make_poincare_chart(Vec3::Zero(), 0), DomainError);
    // center not orthogonal to the distinguished axis
    CHECK_THROWS_AS(make_poincare_chart(Vec3(0.6, 0.0, 0.8), 0), DomainError);
}

TEST_CASE("chart symplecticity against the sphere form")
{
    // Lemma-style identity: in chart components, dp^dq evaluated on
    // tangent vectors m x w equals -m.(w x w'); finite differences.
    const PoincareChart chart = make_poincare_chart(Vec3(0.3, 0.0, 1.1), 1);
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> uni(-0.6, 0.6);
    double worst = 0;
    for (int k = 0; k < 200; ++k) {
        const double q = uni(rng), p = uni(rng);
        if (q * q + p * p >= 1.5 * chart.rho)
            continue;
        const double h = 1e-6;
        const Vec3 dq = (poincare_embed(chart, q + h, p) -
                         poincare_embed(chart, q - h, p)) /
                        (2 * h);
        const Vec3 dp = (poincare_embed(chart, q, p + h) -
                         poincare_embed(chart, q, p - h)) /
                        (2 * h);
        const Vec3 m = poincare_embed(chart, q, p);
        const Vec3 w1(uni(rng), uni(rng), uni(rng));
        const Vec3 w2(uni(rng), uni(rng), uni(rng));
        Eigen::Matrix<double, 3, 2> jac;
        jac.col(0) = dq;
        jac.col(1) = dp;
        const Vec2 a1 = jac.colPivHouseholderQr().solve(m.cross(w1));
        const Vec2 a2 = jac.colPivHouseholderQr().solve(m.cross(w2));
        const double form = a1[1] * a2[0] - a1[0] * a2[1];
        worst = std::max(worst, std::abs(form + m.dot(w1.cross(w2))));
    }
    CHECK(worst <= 1e-7);
}

TEST_CASE("oriented chart carries the opposite orientation")
{
    // chart_embed(q,p) = poincare_embed(-q,p): its pullback is dq^dp.
    const PoincareChart chart = make_poincare_chart(Vec3(0.0, 0.0, 0.9), 0);
    CHECK((chart_embed(chart, 0.2, 0.3) - poincare_embed(chart, -0.2, 0.3))
              .norm() <= 1e-15);
}

TEST_CASE("reduced hamiltonian at the origin and criticality")
{
    for (EllipsoidType t : kAllTypes) {
        const SemiAxes b = elliptic_point(t);
        const EquilibriumPoint e = make_equilibrium(t, b);
        const double at_origin = reduced_hamiltonian(
            e, Vec2::Zero(), Vec2::Zero(), Vec2::Zero(), Vec2::Zero());
        CHECK(at_origin ==
              doctest::Approx(hamiltonian_tilde(b, e.M)).epsilon(1e-13));
        // FD gradient vanishes at the equilibrium.
        const double h = 1e-5;
        double worst = 0;
        for (int i = 0; i < 8; ++i) {
            auto eval = [&](double s) {
                Vec8 y = Vec8::Zero();
                y[i] = s * h;
                return reduced_hamiltonian(e, Vec2(y[0], y[1]),
                                           Vec2(y[2], y[3]), Vec2(y[4], y[5]),
                                           Vec2(y[6], y[7]));
            };
            worst = std::max(worst, std::abs(eval(1) - eval(-1)) / (2 * h));
        }
        CHECK(worst <= 1e-6);
    }
}

TEST_CASE("irrotational six-dimensional variant is critical")
{
    // On the irrotational S2 curve one momentum vanishes and the reduced
    // space drops to six dimensions with kinetic term (1/2) m_l.J1 m_l.
    const double x = 0.55;
    double ylo = 0.36, yhi = 0.50;
    for (int it = 0; it < 60; ++it) {
        const double ym = 0.5 * (ylo + yhi);
        const SemiAxes b = from_shape_coords({x, ym});
        const double gap =
            gs_plus(b.b1, b.b2, b.b3()) - gs_minus(b.b1, b.b2, b.b3());
        (gap > 0 ? ylo : yhi) = ym;
    }
    const SemiAxes b = from_shape_coords({x, 0.5 * (ylo + yhi)});
    const MomentumPair m = momenta(EllipsoidType::S2, b, Branch::PlusMinus);
    const PoincareChart chart = make_poincare_chart(m.m_l, 0);
    const double h = 1e-5;
    auto H6 = [&](double db1, double db2, double q, double p) {
        return reduced_hamiltonian_irrotational(
            SemiAxes{b.b1 + db1, b.b2 + db2}, Vec2::Zero(), chart, q, p);
    };
    CHECK(std::abs(H6(h, 0, 0, 0) - H6(-h, 0, 0, 0)) / (2 * h) <= 1e-6);
    CHECK(std::abs(H6(0, h, 0, 0) - H6(0, -h, 0, 0)) / (2 * h) <= 1e-6);
    CHECK(std::abs(H6(0, 0, h, 0) - H6(0, 0, -h, 0)) / (2 * h) <= 1e-6);
    CHECK(std::abs(H6(0, 0, 0, h) - H6(0, 0, 0, -h)) / (2 * h) <= 1e-6);
}

TEST_CASE("hessian block structure per type")
{
    for (EllipsoidType t : kAllTypes) {
        const EquilibriumPoint e = make_equilibrium(t, elliptic_point(t));
        const HessianReport rep = hessian_at_equilibrium(e);
        CHECK(rep.block_residual <= 1e-9);
        const Mat8 & h = rep.hessian;
        // cc block equals K exactly.
        CHECK((h.block<2, 2>(2, 2) - mass_matrices(e.b).K).norm() == 0);
        if (t == EllipsoidType::S2 || t == EllipsoidType::S3) {
            // block diagonal: bq couplings vanish as well.
            CHECK(h.block<2, 2>(0, 4).cwiseAbs().maxCoeff() <=
                  1e-12 * rep.scale);
        } else {
            // only the bq/qb couplings survive off the diagonal.
            CHECK(h.block<2, 2>(0, 4).cwiseAbs().maxCoeff() >
                  1e-6 * rep.scale);
            CHECK(h.block<2, 2>(0, 6).cwiseAbs().maxCoeff() <=
                  1e-12 * rep.scale);
        }
        // H''_pp indefinite for the planar types.
        if (t == EllipsoidType::I || t == EllipsoidType::II ||
            t == EllipsoidType::III) {
            Eigen::SelfAdjointEigenSolver<Mat2> es(h.block<2, 2>(6, 6));
            CHECK(es.eigenvalues()[0] < 0);
            CHECK(es.eigenvalues()[1] > 0);
        }
    }
}

TEST_CASE("wrong frame axis breaks the zero blocks")
{
    const EquilibriumPoint e =
        make_equilibrium(EllipsoidType::III, elliptic_point(EllipsoidType::III));
    // e3 is correct for type III; e1 lies in the momentum plane.
    CHECK_THROWS_AS(hessian_at_equilibrium(e, 0), DomainError);
}

TEST_CASE("linearization: spectrum symmetry and paper verdicts")
{
    for (EllipsoidType t : kAllTypes) {
        const auto lin = linearize(make_equilibrium(t, elliptic_point(t)));
        CHECK(spectrum_symmetry_residual(lin.eigenvalues) <= 1e-9);
    }
    // All S3 samples elliptic.
    for (const SemiAxes& b : region_points(EllipsoidType::S3, 10))
        CHECK(linearize(make_equilibrium(EllipsoidType::S3, b)).elliptic);
    // Coparallel S2: elliptic iff Gtilde <= 0.
    const SemiAxes cop_unstable = from_shape_coords({0.42, 0.28});
    if (region_contains(EllipsoidType::S2, cop_unstable)) {
        const EquilibriumPoint e =
            make_equilibrium(EllipsoidType::S2, cop_unstable);
        REQUIRE(classify_parallelism(e) == Parallelism::Coparallel);
        const double gt =
            gtilde(cop_unstable.b1, cop_unstable.b2, cop_unstable.b3());
        const bool elliptic = linearize(e).elliptic;
        CHECK(elliptic == (gt <= 0));
    }
    const SemiAxes cop_stable = from_shape_coords({0.52, 0.40});
    {
        const EquilibriumPoint e =
            make_equilibrium(EllipsoidType::S2, cop_stable);
        REQUIRE(classify_parallelism(e) == Parallelism::Coparallel);
        CHECK(gtilde(cop_stable.b1, cop_stable.b2, cop_stable.b3()) <= 0);
        CHECK(linearize(e).elliptic);
    }
    // Counterparallel S2 are Lyapunov stable, hence elliptic.
    const SemiAxes counter = from_shape_coords({0.55, 0.48});
    {
        const EquilibriumPoint e = make_equilibrium(EllipsoidType::S2, counter);
        REQUIRE(classify_parallelism(e) == Parallelism::Counterparallel);
        CHECK(linearize(e).elliptic);
    }
}

TEST_CASE("verdicts invariant under branch swap and discrete symmetry")
{
    for (EllipsoidType t : {EllipsoidType::S2, EllipsoidType::I}) {
        const SemiAxes b = elliptic_point(t);
        const EquilibriumPoint e1 = make_equilibrium(t, b, Branch::PlusMinus);
        const EquilibriumPoint e2 = make_equilibrium(t, b, Branch::MinusPlus);
        CHECK(linearize(e1).elliptic == linearize(e2).elliptic);
        // Z4 x Z2 replacement of the momenta.
        EquilibriumPoint e3 = e1;
        const Mat3 r = cover_matrix(2);
        e3.M.m_l = -(r * e1.M.m_l);
        e3.M.m_r = -(r * e1.M.m_r);
        CHECK(linearize(e3).elliptic == linearize(e1).elliptic);
        const auto l1 = linearize(e1), l3 = linearize(e3);
        for (int k = 0; k < 8; ++k)
            CHECK(std::abs(l1.eigenvalues[k].imag() -
                           l3.eigenvalues[k].imag()) <= 1e-9);
    }
}

TEST_CASE("S2 block spectra union to the full spectrum")
{
    const EquilibriumPoint e =
        make_equilibrium(EllipsoidType::S2, elliptic_point(EllipsoidType::S2));
    const LinearizationReport lin = linearize(e);
    const Mat4 xbc = lin.X.block<4, 4>(0, 0);
    const Mat4 xqp = lin.X.block<4, 4>(4, 4);
    CHECK(lin.X.block<4, 4>(0, 4).cwiseAbs().maxCoeff() <= 1e-12);
    Eigen::EigenSolver<Mat4> s1(xbc), s2(xqp);
    std::vector<double> im_block;
    for (int i = 0; i < 4; ++i) {
        im_block.push_back(s1.eigenvalues()[i].imag());
        im_block.push_back(s2.eigenvalues()[i].imag());
    }
    std::sort(im_block.begin(), im_block.end());
    std::vector<double> im_full;
    for (int i = 0; i < 8; ++i)
        im_full.push_back(lin.eigenvalues[i].imag());
    std::sort(im_full.begin(), im_full.end());
    for (int i = 0; i < 8; ++i)
        CHECK(im_block[i] == doctest::Approx(im_full[i]).epsilon(1e-9));
}

TEST_CASE("integrator: fixedness, energy conservation, bounded motion")
{
    const EquilibriumPoint e =
        make_equilibrium(EllipsoidType::S3, elliptic_point(EllipsoidType::S3));
    // Zero offset stays put.
    const Trajectory fixed =
        integrate_reduced_flow(e, Vec8::Zero(), 20.0, 0.05);
    CHECK(fixed.completed);
    CHECK(fixed.max_offset <= 1e-9);
    CHECK(fixed.energy_drift <= 1e-10);
    // Generic small offset conserves energy.
    Vec8 offset;
    offset << 1e-3, -2e-3, 1e-3, 2e-3, -1e-3, 1e-3, 2e-3, -2e-3;
    const Trajectory orbit = integrate_reduced_flow(e, offset, 20.0, 0.05);
    CHECK(orbit.completed);
    CHECK(orbit.energy_drift <= 1e-9);
    // Small offsets stay near a Lyapunov stable point.
    Vec8 tiny = Vec8::Constant(1e-4);
    const Trajectory near = integrate_reduced_flow(e, tiny, 20.0, 0.05);
    CHECK(near.completed);
    CHECK(near.max_offset <= 1e-2);
}

TEST_SUITE_END();
