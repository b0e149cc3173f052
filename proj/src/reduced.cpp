#include "riemann/reduced.hpp"
#include "riemann/potential.hpp"
#include "riemann/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace riemann {

namespace {

constexpr double kCoincidenceTol = 1e-10;
constexpr double kBlockTol = 1e-9;

void require_distinct_axes(const SemiAxes& b)
{
    const Vec3 a = b.axes();
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (std::abs(a[i] * a[i] - a[j] * a[j]) < kCoincidenceTol)
                throw DomainError("coincident semiaxes: mass matrix singular");
}

} // namespace

Mat6 MassMatrices::J() const
{
    Mat6 j = Mat6::Zero();
    j.topLeftCorner<3, 3>() = J1.asDiagonal();
    j.bottomRightCorner<3, 3>() = J1.asDiagonal();
    j.topRightCorner<3, 3>() = J2.asDiagonal();
    j.bottomLeftCorner<3, 3>() = J2.asDiagonal();
    return j;
}

MassMatrices mass_matrices(const SemiAxes& b)
{
    require_shape_domain(b);
    require_distinct_axes(b);
    const double b1 = b.b1, b2 = b.b2, b3 = b.b3();
    const double q1 = b1 * b1, q2 = b2 * b2, q3 = b3 * b3;

    MassMatrices m;
    const double den = q2 * q3 + q1 * q3 + q1 * q2;
    m.K << q1 * (q2 + q3), -b3, -b3, q2 * (q1 + q3);
    m.K /= den;

    const double d23 = q2 - q3, d13 = q1 - q3, d12 = q1 - q2;
    m.J1 = Vec3((q2 + q3) / (d23 * d23), (q1 + q3) / (d13 * d13),
                (q1 + q2) / (d12 * d12));
    m.J2 = Vec3(2 * b2 * b3 / (d23 * d23), 2 * b1 * b3 / (d13 * d13),
                2 * b1 * b2 / (d12 * d12));
    return m;
}

MassMatrixJets mass_matrix_jets(const SemiAxes& b)
{
    require_shape_domain(b);
    require_distinct_axes(b);
    const Jet2 b1 = Jet2::variable(b.b1, 0);
    const Jet2 b2 = Jet2::variable(b.b2, 1);
    const Jet2 b3 = (b1 * b2).reciprocal();
    const Jet2 q1 = square(b1), q2 = square(b2), q3 = square(b3);

    MassMatrixJets jets;
    const Jet2 den = q2 * q3 + q1 * q3 + q1 * q2;
    const Jet2 invden = den.reciprocal();
    jets.K[0][0] = q1 * (q2 + q3) * invden;
    jets.K[0][1] = -b3 * invden;
    jets.K[1][0] = jets.K[0][1];
    jets.K[1][1] = q2 * (q1 + q3) * invden;

    const Jet2 i23 = square(q2 - q3).reciprocal();
    const Jet2 i13 = square(q1 - q3).reciprocal();
    const Jet2 i12 = square(q1 - q2).reciprocal();
    jets.J1[0] = (q2 + q3) * i23;
    jets.J1[1] = (q1 + q3) * i13;
    jets.J1[2] = (q1 + q2) * i12;
    jets.J2[0] = 2.0 * b2 * b3 * i23;
    jets.J2[1] = 2.0 * b1 * b3 * i13;
    jets.J2[2] = 2.0 * b1 * b2 * i12;
    return jets;
}

double hamiltonian_tilde(const SemiAxes& b, const MomentumPair& m, double g)
{
    const MassMatrices mm = mass_matrices(b);
    const double kinetic =
        0.5 * (m.m_l.dot(mm.J1.asDiagonal() * m.m_l) +
               m.m_r.dot(mm.J1.asDiagonal() * m.m_r)) +
        m.m_l.dot(mm.J2.asDiagonal() * m.m_r);
    return kinetic + potential_v(b, g);
}

PoincareChart make_poincare_chart(const Vec3& center, int axis)
{
    const double rho = center.norm();
    if (!(rho > 0))
        throw DomainError("poincare chart requires a nonzero center");
    if (axis < 0 || axis > 2)
        throw DomainError("poincare chart: axis index must be 0..2");
    const Vec3 n = center / rho;
    if (std::abs(n[axis]) > 1e-9)
        throw DomainError("poincare chart: center not orthogonal to the "
                          "distinguished axis");
    PoincareChart chart;
    chart.center = center;
    chart.rho = rho;
    chart.frame.col(0) = Vec3::Unit(axis);
    chart.frame.col(2) = n;
    chart.frame.col(1) = n.cross(Vec3::Unit(axis));
    return chart;
}

namespace {

Vec3 mtilde(double rho, double q, double p)
{
    const double w = q * q + p * p;
    const double s = std::sqrt(rho - 0.25 * w);
    return Vec3(p * s, -q * s, rho - 0.5 * w);
}

Vec3 mtilde_dq(double rho, double q, double p)
{
    const double w = q * q + p * p;
    const double s = std::sqrt(rho - 0.25 * w);
    return Vec3(-p * q / (4 * s), -s + q * q / (4 * s), -q);
}

Vec3 mtilde_dp(double rho, double q, double p)
{
    const double w = q * q + p * p;
    const double s = std::sqrt(rho - 0.25 * w);
    return Vec3(s - p * p / (4 * s), q * p / (4 * s), -p);
}

void require_in_disk(const PoincareChart& chart, double q, double p)
{
    if (q * q + p * p >= 2 * chart.rho)
        throw DomainError("poincare chart: point outside the disk");
}

} // namespace

Vec3 chart_embed(const PoincareChart& chart, double q, double p)
{
    require_in_disk(chart, q, p);
    return chart.frame * mtilde(chart.rho, -q, p);
}

Vec3 chart_embed_dq(const PoincareChart& chart, double q, double p)
{
    require_in_disk(chart, q, p);
    return chart.frame * (-mtilde_dq(chart.rho, -q, p));
}

Vec3 chart_embed_dp(const PoincareChart& chart, double q, double p)
{
    require_in_disk(chart, q, p);
    return chart.frame * mtilde_dp(chart.rho, -q, p);
}

Vec3 poincare_embed(const PoincareChart& chart, double q, double p)
{
    require_in_disk(chart, q, p);
    return chart.frame * mtilde(chart.rho, q, p);
}

Vec3 chart_dq(const PoincareChart& chart, double q, double p)
{
    require_in_disk(chart, q, p);
    return chart.frame * mtilde_dq(chart.rho, q, p);
}

Vec3 chart_dp(const PoincareChart& chart, double q, double p)
{
    require_in_disk(chart, q, p);
    return chart.frame * mtilde_dp(chart.rho, q, p);
}

int distinguished_axis(EllipsoidType type)
{
    switch (type) {
    case EllipsoidType::S2:
    case EllipsoidType::S3: return 0;
    case EllipsoidType::I:
    case EllipsoidType::II: return 1;
    case EllipsoidType::III: return 2;
    }
    return 0;
}

ChartPair equilibrium_charts(const EquilibriumPoint& e)
{
    const int axis = distinguished_axis(e.type);
    return ChartPair{make_poincare_chart(e.M.m_l, axis),
                     make_poincare_chart(e.M.m_r, axis)};
}

double reduced_hamiltonian(const EquilibriumPoint& e, const Vec2& db,
                           const Vec2& c, const Vec2& q, const Vec2& p)
{
    const SemiAxes b{e.b.b1 + db[0], e.b.b2 + db[1]};
    const ChartPair charts = equilibrium_charts(e);
    const MomentumPair m{chart_embed(charts.left, q[0], p[0]),
                         chart_embed(charts.right, q[1], p[1])};
    const MassMatrices mm = mass_matrices(b);
    return 0.5 * c.dot(mm.K * c) + hamiltonian_tilde(b, m, e.g);
}

double reduced_hamiltonian_irrotational(const SemiAxes& b, const Vec2& c,
                                        const PoincareChart& chart, double q,
                                        double p, double g)
{
    const MassMatrices mm = mass_matrices(b);
    const Vec3 ml = chart_embed(chart, q, p);
    return 0.5 * c.dot(mm.K * c) +
           0.5 * ml.dot(mm.J1.asDiagonal() * ml) + potential_v(b, g);
}

Mat8 symplectic_structure()
{
    Mat8 s = Mat8::Zero();
    const Mat2 id = Mat2::Identity();
    s.block<2, 2>(0, 2) = id;
    s.block<2, 2>(2, 0) = -id;
    s.block<2, 2>(4, 6) = id;
    s.block<2, 2>(6, 4) = -id;
    return s;
}

HessianReport hessian_at_equilibrium(const EquilibriumPoint& e, int frame_axis)
{
    const int axis = frame_axis < 0 ? distinguished_axis(e.type) : frame_axis;
    const PoincareChart chl = make_poincare_chart(e.M.m_l, axis);
    const PoincareChart chr = make_poincare_chart(e.M.m_r, axis);

    const MassMatrixJets jets = mass_matrix_jets(e.b);
    const PotentialDerivatives pd = potential_derivatives(e.b, 2, e.g);
    const MassMatrices mm = mass_matrices(e.b);

    const Vec3 ml = e.M.m_l, mr = e.M.m_r;
    const Vec3 gl = mm.J1.asDiagonal() * ml + mm.J2.asDiagonal() * mr;
    const Vec3 gr = mm.J2.asDiagonal() * ml + mm.J1.asDiagonal() * mr;

    // Chart differentials at the origin; the second derivatives of the
    // chart there are -center_hat on both diagonal entries.
    const double srl = std::sqrt(chl.rho), srr = std::sqrt(chr.rho);
    const Vec3 dq[2] = {srl * chl.frame.col(1), srr * chr.frame.col(1)};
    const Vec3 dp[2] = {srl * chl.frame.col(0), srr * chr.frame.col(0)};
    const Vec3 mhat[2] = {chl.frame.col(2), chr.frame.col(2)};
    const Vec3 gvec[2] = {gl, gr};

    // d J1/db_i, d J2/db_i as diagonal vectors, i indexes (b1, b2).
    Vec3 dJ1[2], dJ2[2];
    Mat2 halfd2Jmm = Mat2::Zero(); // (1/2) m . d^2 J / db_i db_j m
    for (int i = 0; i < 2; ++i) {
        for (int k = 0; k < 3; ++k) {
            dJ1[i][k] = jets.J1[k].derivative(i == 0 ? 1 : 0, i == 0 ? 0 : 1);
            dJ2[i][k] = jets.J2[k].derivative(i == 0 ? 1 : 0, i == 0 ? 0 : 1);
        }
    }
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const int k1 = (i == 0) + (j == 0), k2 = (i == 1) + (j == 1);
            double acc = 0;
            for (int k = 0; k < 3; ++k) {
                const double d1 = jets.J1[k].derivative(k1, k2);
                const double d2 = jets.J2[k].derivative(k1, k2);
                acc += 0.5 * d1 * (ml[k] * ml[k] + mr[k] * mr[k]) +
                       d2 * ml[k] * mr[k];
            }
            halfd2Jmm(i, j) = acc;
        }

    Mat8 h = Mat8::Zero();

    // bb block: (1/2) m.J''m + V''.
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            h(i, j) = halfd2Jmm(i, j) +
                      pd.d((i == 0) + (j == 0), (i == 1) + (j == 1));

    // cc block.
    h.block<2, 2>(2, 2) = mm.K;

    // b-(q,p) coupling: (dM/du) . (dJ/db_i) M*.
    auto dJ_m = [&](int i, int sphere) {
        // component `sphere` of (dJ/db_i) M*.
        return sphere == 0
                   ? Vec3(dJ1[i].asDiagonal() * ml + dJ2[i].asDiagonal() * mr)
                   : Vec3(dJ2[i].asDiagonal() * ml + dJ1[i].asDiagonal() * mr);
    };
    for (int i = 0; i < 2; ++i)
        for (int s = 0; s < 2; ++s) {
            h(i, 4 + s) = dq[s].dot(dJ_m(i, s));
            h(4 + s, i) = h(i, 4 + s);
            h(i, 6 + s) = dp[s].dot(dJ_m(i, s));
            h(6 + s, i) = h(i, 6 + s);
        }

    // (q,p) x (q,p) blocks: first-derivative products through J plus the
    // chart curvature term -mhat.g on the diagonal.
    auto jdot = [&](const Vec3& u, int su, const Vec3& v, int sv) {
        // u.(J v) with u on sphere su, v on sphere sv.
        const Vec3 diag = (su == sv) ? mm.J1 : mm.J2;
        return u.dot(diag.asDiagonal() * v);
    };
    for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t) {
            double qq = jdot(dq[s], s, dq[t], t);
            double pp = jdot(dp[s], s, dp[t], t);
            const double qp = jdot(dq[s], s, dp[t], t);
            if (s == t) {
                qq -= mhat[s].dot(gvec[s]);
                pp -= mhat[s].dot(gvec[s]);
            }
            h(4 + s, 4 + t) = qq;
            h(6 + s, 6 + t) = pp;
            h(4 + s, 6 + t) = qp;
            h(6 + t, 4 + s) = qp;
        }

    HessianReport report;
    report.hessian = h;
    report.scale = h.cwiseAbs().maxCoeff();

    double res = 0;
    // H_cb, H_cq, H_cp are structural zeros of the assembly; check the
    // computed couplings that Lemma-type cancellations must kill.
    res = std::max(res, h.block<2, 2>(0, 6).cwiseAbs().maxCoeff()); // bp
    res = std::max(res, h.block<2, 2>(4, 6).cwiseAbs().maxCoeff()); // qp
    res = std::max(res,
                   (h.block<2, 2>(2, 2) - mm.K).cwiseAbs().maxCoeff()); // cc-K
    if (e.type == EllipsoidType::S2 || e.type == EllipsoidType::S3)
        res = std::max(res, h.block<2, 2>(0, 4).cwiseAbs().maxCoeff()); // bq
    report.block_residual = res / report.scale;
    if (report.block_residual > kBlockTol)
        throw DomainError(
            "hessian block structure violated (wrong frame axis?): residual " +
            std::to_string(report.block_residual));
    return report;
}

LinearizationReport linearize(const EquilibriumPoint& e, double tol_ell)
{
    LinearizationReport rep;
    rep.tol_ell = tol_ell;
    rep.hessian = hessian_at_equilibrium(e).hessian;
    rep.X = symplectic_structure() * rep.hessian;

    Eigen::EigenSolver<Mat8> solver(rep.X);
    if (solver.info() != Eigen::Success)
        throw DomainError("eigensolver failed on the linearization");
    rep.eigenvalues = solver.eigenvalues();
    std::sort(rep.eigenvalues.data(), rep.eigenvalues.data() + 8,
              [](const std::complex<double>& a, const std::complex<double>& b) {
                  if (a.real() != b.real())
                      return a.real() < b.real();
                  return a.imag() < b.imag();
              });

    rep.elliptic = true;
    rep.margin_flag = false;
    rep.zero_modes = 0;
    double lam_max = 0;
    for (int i = 0; i < 8; ++i)
        lam_max = std::max(lam_max, std::abs(rep.eigenvalues[i]));
    for (int i = 0; i < 8; ++i) {
        const auto lam = rep.eigenvalues[i];
        const double tol = tol_ell * std::max(1.0, std::abs(lam));
        if (std::abs(lam.real()) > tol)
            rep.elliptic = false;
        if (std::abs(std::abs(lam.real()) - tol) <= 10 * tol)
            rep.margin_flag = true;
        if (std::abs(lam) <= tol_ell * std::max(1.0, lam_max))
            rep.zero_modes += 1;
    }
    return rep;
}

double spectrum_symmetry_residual(
    const Eigen::Matrix<std::complex<double>, 8, 1>& eigenvalues)
{
    auto dist_to_multiset = [&](const std::complex<double>& z) {
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 8; ++i)
            best = std::min(best, std::abs(eigenvalues[i] - z));
        return best;
    };
    double res = 0;
    for (int i = 0; i < 8; ++i) {
        res = std::max(res, dist_to_multiset(-eigenvalues[i]));
        res = std::max(res, dist_to_multiset(std::conj(eigenvalues[i])));
    }
    return res;
}

namespace {

/// Gradient of the reduced Hamiltonian in chart coordinates.
Vec8 hamiltonian_gradient(const EquilibriumPoint& e, const ChartPair& charts,
                          const Vec8& y)
{
    const SemiAxes b{e.b.b1 + y[0], e.b.b2 + y[1]};
    require_shape_domain(b);
    const Vec2 c(y[2], y[3]);
    const double q1 = y[4], q2 = y[5], p1 = y[6], p2 = y[7];

    const MassMatrices mm = mass_matrices(b);
    const MassMatrixJets jets = mass_matrix_jets(b);
    const PotentialDerivatives pd = potential_derivatives(b, 1, e.g);

    const Vec3 Ml = chart_embed(charts.left, q1, p1);
    const Vec3 Mr = chart_embed(charts.right, q2, p2);
    const Vec3 gl = mm.J1.asDiagonal() * Ml + mm.J2.asDiagonal() * Mr;
    const Vec3 gr = mm.J2.asDiagonal() * Ml + mm.J1.asDiagonal() * Mr;

    Vec8 grad;
    for (int i = 0; i < 2; ++i) {
        const int k1 = i == 0 ? 1 : 0, k2 = 1 - k1;
        double acc = pd.d(k1, k2);
        for (int k = 0; k < 3; ++k) {
            const double dj1 = jets.J1[k].derivative(k1, k2);
            const double dj2 = jets.J2[k].derivative(k1, k2);
            acc += 0.5 * dj1 * (Ml[k] * Ml[k] + Mr[k] * Mr[k]) +
                   dj2 * Ml[k] * Mr[k];
        }
        acc += 0.5 * jets.K[0][0].derivative(k1, k2) * c[0] * c[0] +
               jets.K[0][1].derivative(k1, k2) * c[0] * c[1] +
               0.5 * jets.K[1][1].derivative(k1, k2) * c[1] * c[1];
        grad[i] = acc;
    }
    const Vec2 kc = mm.K * c;
    grad[2] = kc[0];
    grad[3] = kc[1];
    grad[4] = chart_embed_dq(charts.left, q1, p1).dot(gl);
    grad[5] = chart_embed_dq(charts.right, q2, p2).dot(gr);
    grad[6] = chart_embed_dp(charts.left, q1, p1).dot(gl);
    grad[7] = chart_embed_dp(charts.right, q2, p2).dot(gr);
    return grad;
}

/// Runtime-derived Butcher tableau of the 4-stage Gauss-Legendre
/// collocation method (order 8).
struct GaussTableau {
    Vec4 c;
    Vec4 b;
    Mat4 a;
};

const GaussTableau& gauss_tableau()
{
    static const GaussTableau tab = [] {
        GaussTableau t;
        const GaussRule& rule = gauss_legendre(4);
        for (int i = 0; i < 4; ++i) {
            t.c[i] = 0.5 * (rule.nodes[i] + 1);
            t.b[i] = 0.5 * rule.weights[i];
        }
        // Collocation conditions: sum_j a_ij c_j^k = c_i^{k+1}/(k+1).
        Mat4 vand;
        for (int k = 0; k < 4; ++k)
            for (int j = 0; j < 4; ++j)
                vand(k, j) = std::pow(t.c[j], k);
        for (int i = 0; i < 4; ++i) {
            Vec4 rhs;
            for (int k = 0; k < 4; ++k)
                rhs[k] = std::pow(t.c[i], k + 1) / (k + 1);
            t.a.row(i) = vand.fullPivLu().solve(rhs).transpose();
        }
        return t;
    }();
    return tab;
}

bool gauss_step(const EquilibriumPoint& e, const ChartPair& charts,
                const Vec8& y, double h, Vec8& out)
{
    const GaussTableau& tab = gauss_tableau();
    const Mat8 S = symplectic_structure();
    Vec8 k[4];
    const Vec8 f0 = S * hamiltonian_gradient(e, charts, y);
    for (int i = 0; i < 4; ++i)
        k[i] = f0;
    for (int iter = 0; iter < 100; ++iter) {
        double delta = 0;
        for (int i = 0; i < 4; ++i) {
            Vec8 yi = y;
            for (int j = 0; j < 4; ++j)
                yi += h * tab.a(i, j) * k[j];
            const Vec8 ki = S * hamiltonian_gradient(e, charts, yi);
            delta = std::max(delta, (ki - k[i]).cwiseAbs().maxCoeff());
            k[i] = ki;
        }
        if (delta < 1e-14)
            break;
        if (iter == 99)
            return false;
    }
    out = y;
    for (int i = 0; i < 4; ++i)
        out += h * tab.b[i] * k[i];
    return true;
}

} // namespace

Trajectory integrate_reduced_flow(const EquilibriumPoint& e,
                                  const Vec8& initial_offset, double T,
                                  double dt, double tol)
{
    Trajectory traj;
    const ChartPair charts = equilibrium_charts(e);

    Vec8 y = initial_offset;
    double t = 0;
    double h = dt;
    const double h_max = dt;

    const double H0 = reduced_hamiltonian(e, Vec2(y[0], y[1]), Vec2(y[2], y[3]),
                                          Vec2(y[4], y[5]), Vec2(y[6], y[7]));
    const double energy_scale = std::max(1.0, std::abs(H0));

    traj.times.push_back(0);
    traj.states.push_back(y);

    while (t < T) {
        h = std::min(h, T - t);
        Vec8 y_full, y_half, y_two;
        bool ok = false;
        try {
            ok = gauss_step(e, charts, y, h, y_full) &&
                 gauss_step(e, charts, y, h / 2, y_half) &&
                 gauss_step(e, charts, y_half, h / 2, y_two);
        } catch (const DomainError&) {
            traj.completed = false;
            break;
        }
        if (!ok) {
            h *= 0.5;
            if (h < 1e-12) {
                traj.completed = false;
                break;
            }
            continue;
        }
        const double err = (y_full - y_two).cwiseAbs().maxCoeff() / 255.0;
        const double tol_step = tol * std::max(1.0, y.cwiseAbs().maxCoeff());
        if (err > tol_step && h > 1e-10) {
            h *= 0.5;
            continue;
        }
        y = y_two;
        t += h;
        traj.steps += 1;
        if (err < tol_step / 512)
            h = std::min(2 * h, h_max);

        const double H = reduced_hamiltonian(e, Vec2(y[0], y[1]),
                                             Vec2(y[2], y[3]),
                                             Vec2(y[4], y[5]),
                                             Vec2(y[6], y[7]));
        traj.energy_drift =
            std::max(traj.energy_drift, std::abs(H - H0) / energy_scale);
        traj.max_offset =
            std::max(traj.max_offset,
                     (y - initial_offset).cwiseAbs().maxCoeff());
        if (traj.states.size() < 4096 || t >= T) {
            traj.times.push_back(t);
            traj.states.push_back(y);
        }
    }
    return traj;
}

} // namespace riemann
