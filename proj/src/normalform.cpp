#include "riemann/normalform.hpp"
#include "riemann/potential.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>

namespace riemann {

namespace {

constexpr double kGammaTol = 1e-12;
constexpr double kOrientationTol = 1e-6;

struct Mode {
    double omega;
    Eigen::Matrix<cdouble, 8, 1> vec;
    int block; // 0 = (b,c), 1 = (q,p); -1 when the problem does not split
};

/// Eigenmodes with positive imaginary eigenvalue of a real 4x4 block,
/// embedded back into 8 dimensions at `offset`.
std::vector<Mode> block_modes(const Mat8& X, int offset)
{
    const Mat4 block = X.block<4, 4>(offset, offset);
    Eigen::EigenSolver<Mat4> solver(block);
    if (solver.info() != Eigen::Success)
        throw DomainError("eigensolver failed on a 4x4 block");
    std::vector<Mode> modes;
    for (int i = 0; i < 4; ++i) {
        const cdouble lam = solver.eigenvalues()[i];
        if (lam.imag() <= 0)
            continue;
        Mode m;
        m.omega = lam.imag();
        m.vec.setZero();
        m.vec.segment<4>(offset) = solver.eigenvectors().col(i);
        m.block = offset == 0 ? 0 : 1;
        modes.push_back(m);
    }
    return modes;
}

std::vector<Mode> full_modes(const Mat8& X)
{
    Eigen::EigenSolver<Mat8> solver(X);
    if (solver.info() != Eigen::Success)
        throw DomainError("eigensolver failed on the linearization");
    std::vector<Mode> modes;
    for (int i = 0; i < 8; ++i) {
        const cdouble lam = solver.eigenvalues()[i];
        if (lam.imag() <= 0)
            continue;
        Mode m;
        m.omega = lam.imag();
        m.vec = solver.eigenvectors().col(i);
        m.block = -1;
        modes.push_back(m);
    }
    return modes;
}

void fix_phase(Eigen::Matrix<cdouble, 8, 1>& v)
{
    int idx = 0;
    double best = 0;
    for (int i = 0; i < 8; ++i)
        if (std::abs(v[i]) > best) {
            best = std::abs(v[i]);
            idx = i;
        }
    v *= std::conj(v[idx]) / std::abs(v[idx]);
}

Mat8 assemble_columns(const std::array<Vec8, 4>& u,
                      const std::array<Vec8, 4>& v)
{
    // Xi layout (B1,B2,C1,C2,Q1,Q2,P1,P2): mode j contributes u_j at the
    // B/Q slot and v_j at the C/P slot.
    Mat8 t;
    t.col(0) = u[0];
    t.col(1) = u[1];
    t.col(2) = v[0];
    t.col(3) = v[1];
    t.col(4) = u[2];
    t.col(5) = u[3];
    t.col(6) = v[2];
    t.col(7) = v[3];
    return t;
}

double symplectic_residual_of(const Mat8& t)
{
    const Mat8 j8 = symplectic_structure();
    return (t.transpose() * j8 * t - j8).cwiseAbs().maxCoeff();
}

/// Residual of T'HT against the diagonal pattern of the normalized H2
/// form, diag(s1 w1, s2 w2, s1 w1, s2 w2, s3 w3, ...).
double h2_pattern_residual(const Mat8& t, const Mat8& hessian,
                           const Vec4& Omega)
{
    const Mat8 g = t.transpose() * hessian * t;
    Mat8 expected = Mat8::Zero();
    const int slot[8] = {0, 1, 0, 1, 2, 3, 2, 3};
    for (int i = 0; i < 8; ++i)
        expected(i, i) = Omega[slot[i]];
    return (g - expected).cwiseAbs().maxCoeff() /
           std::max(1.0, Omega.cwiseAbs().maxCoeff());
}

void check_res2(const Vec4& Omega, bool s_type, double res_tol)
{
    for (int j = 0; j < 4; ++j)
        if (std::abs(Omega[j]) <= res_tol) {
            ResonanceVec nu{0, 0, 0, 0};
            nu[j] = 1;
            throw ResonanceError(nu, 1, std::abs(Omega[j]));
        }
    auto check_pair = [&](int i, int j) {
        for (int s : {+1, -1}) {
            const double v = Omega[i] + s * Omega[j];
            if (std::abs(v) <= res_tol) {
                ResonanceVec nu{0, 0, 0, 0};
                nu[i] = 1;
                nu[j] = s;
                throw ResonanceError(nu, 2, std::abs(v));
            }
        }
    };
    if (s_type) {
        // The construction factorizes; only the in-block pairs matter.
        check_pair(0, 1);
        check_pair(2, 3);
    } else {
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j)
                check_pair(i, j);
    }
}

TruncatedSeries jet_to_series(const Jet2& jet, int max_order = 4)
{
    TruncatedSeries s(4);
    for (int i = 0; i <= max_order; ++i)
        for (int j = 0; i + j <= max_order; ++j)
            if (jet.coeff(i, j) != 0)
                s.add_term(Exponents{i, j, 0, 0, 0, 0, 0, 0}, jet.coeff(i, j));
    return s;
}

} // namespace

double default_res_tol(const Vec4& Omega)
{
    return 1e-6 * Omega.norm();
}

FrequencyData symplectic_diagonalize(const LinearizationReport& lin,
                                     EllipsoidType type, double res_tol)
{
    if (!lin.elliptic)
        throw DomainError("symplectic_diagonalize requires ellipticity");
    const bool s_type =
        type == EllipsoidType::S2 || type == EllipsoidType::S3;

    std::vector<Mode> modes;
    if (s_type) {
        auto bc = block_modes(lin.X, 0);
        auto qp = block_modes(lin.X, 4);
        std::sort(bc.begin(), bc.end(),
                  [](const Mode& a, const Mode& b) { return a.omega > b.omega; });
        std::sort(qp.begin(), qp.end(),
                  [](const Mode& a, const Mode& b) { return a.omega > b.omega; });
        modes = bc;
        modes.insert(modes.end(), qp.begin(), qp.end());
    } else {
        modes = full_modes(lin.X);
        std::sort(modes.begin(), modes.end(),
                  [](const Mode& a, const Mode& b) { return a.omega > b.omega; });
    }
    if (modes.size() != 4) {
        // A vanishing frequency: the construction hypothesis fails.
        throw ResonanceError(ResonanceVec{1, 0, 0, 0}, 1, 0.0);
    }

    FrequencyData fd;
    const Mat8 j8 = symplectic_structure();
    std::array<Vec8, 4> u, v;
    for (int j = 0; j < 4; ++j) {
        fd.omega[j] = modes[j].omega;
        fd.permutation[j] = j;
        auto vec = modes[j].vec;
        fix_phase(vec);
        const Vec8 xr = vec.real(), xi = vec.imag();
        const double gamma = xr.dot(j8 * xi);
        const double scale = xr.squaredNorm() + xi.squaredNorm();
        if (std::abs(gamma) < kGammaTol * scale)
            throw DomainError("degenerate eigenvector pairing (Gamma ~ 0)");
        fd.Gamma[j] = gamma;
        fd.signs[j] = gamma > 0 ? 1 : -1;
        const double gj = std::sqrt(std::abs(gamma));
        if (gamma > 0) {
            u[j] = xr / gj;
            v[j] = xi / gj;
        } else {
            u[j] = xi / gj;
            v[j] = xr / gj;
        }
        fd.Omega[j] = fd.signs[j] * fd.omega[j];
    }
    check_res2(fd.Omega, s_type, res_tol);

    // The defining construction lists the vectors as rows with
    // Xi = T^-1 xi; the orientation is settled by the symplecticity and
    // H2-form invariants, and the column layout is the one that passes.
    const Mat8 t_cols = assemble_columns(u, v);
    double r1 = symplectic_residual_of(t_cols);
    double r2 = h2_pattern_residual(t_cols, lin.hessian, fd.Omega);
    if (r1 < kOrientationTol && r2 < kOrientationTol) {
        fd.T = t_cols;
        return fd;
    }
    const Mat8 t_rows = t_cols.transpose();
    r1 = symplectic_residual_of(t_rows);
    r2 = h2_pattern_residual(t_rows, lin.hessian, fd.Omega);
    if (r1 < kOrientationTol && r2 < kOrientationTol) {
        fd.T = t_rows;
        return fd;
    }
    throw DomainError("no T orientation satisfies the H2-form invariant");
}

TaylorExpansion taylor_hamiltonian(const EquilibriumPoint& e)
{
    const ChartPair charts = equilibrium_charts(e);
    const MassMatrixJets jets = mass_matrix_jets(e.b);
    const PotentialDerivatives pd = potential_derivatives(e.b, 4, e.g);

    // Chart components as series in (q_s, p_s); slots 4,6 and 5,7.
    std::array<std::array<TruncatedSeries, 3>, 2> M;
    for (int s = 0; s < 2; ++s) {
        const PoincareChart& chart = s == 0 ? charts.left : charts.right;
        const TruncatedSeries q = make_variable(4 + s);
        const TruncatedSeries p = make_variable(6 + s);
        const TruncatedSeries w = q * q + p * p;
        const TruncatedSeries sq =
            sqrt_series(make_constant(chart.rho) - w * 0.25);
        // Oriented disk variables (see chart_embed): second component +q.
        const TruncatedSeries mt[3] = {p * sq, sq * q,
                                       make_constant(chart.rho) - w * 0.5};
        for (int k = 0; k < 3; ++k) {
            TruncatedSeries acc(4);
            for (int c = 0; c < 3; ++c)
                acc = acc + mt[c] * chart.frame(k, c);
            M[s][k] = acc;
        }
    }

    // (1/2) M.J(b)M with jet-expanded entries.
    TruncatedSeries h(4);
    for (int k = 0; k < 3; ++k) {
        const TruncatedSeries j1 = jet_to_series(jets.J1[k]);
        const TruncatedSeries j2 = jet_to_series(jets.J2[k]);
        h = h + j1 * (M[0][k] * M[0][k] + M[1][k] * M[1][k]) * 0.5 +
            j2 * (M[0][k] * M[1][k]);
    }

    // (1/2) c.K(b)c.
    const TruncatedSeries c1 = make_variable(2), c2 = make_variable(3);
    h = h + jet_to_series(jets.K[0][0]) * c1 * c1 * 0.5 +
        jet_to_series(jets.K[0][1]) * c1 * c2 +
        jet_to_series(jets.K[1][1]) * c2 * c2 * 0.5;

    // Potential.
    h = h + jet_to_series(pd.taylor());

    TaylorExpansion out;
    out.scale = h.degree_part(2).max_abs_coeff();
    out.degree1_residual =
        h.degree_part(1).max_abs_coeff() / std::max(1.0, out.scale);
    out.series = h.truncate_below(2);
    return out;
}

Eigen::Matrix<cdouble, 8, 8> sigma_matrix()
{
    using CMat8 = Eigen::Matrix<cdouble, 8, 8>;
    CMat8 sig = CMat8::Zero();
    const double r = 1.0 / std::sqrt(2.0);
    const cdouble i(0, 1);
    // B_j = (i W_j + Z_j)/sqrt2, C_j = (-W_j - i Z_j)/sqrt2; (q,p) pairs
    // use modes 3,4.  Xi rows (B1,B2,C1,C2,Q1,Q2,P1,P2), U columns
    // (W1..W4, Z1..Z4).
    const int xi_u[4] = {0, 1, 4, 5};   // B/Q row of mode j
    const int xi_v[4] = {2, 3, 6, 7};   // C/P row of mode j
    for (int j = 0; j < 4; ++j) {
        sig(xi_u[j], j) = i * r;
        sig(xi_u[j], 4 + j) = r;
        sig(xi_v[j], j) = -r;
        sig(xi_v[j], 4 + j) = -i * r;
    }
    return sig;
}

TruncatedSeries complexify(const TruncatedSeries& series_xi, const Mat8& T)
{
    const Eigen::Matrix<cdouble, 8, 8> map =
        T.cast<cdouble>() * sigma_matrix();
    return compose_linear(series_xi, map);
}

NormalFormReport birkhoff_order4(const EquilibriumPoint& e, double res_tol)
{
    const LinearizationReport lin = linearize(e);
    if (!lin.elliptic)
        throw DomainError("birkhoff_order4 requires an elliptic equilibrium");

    NormalFormReport rep;
    if (res_tol < 0) {
        Vec4 om = Vec4::Zero();
        int n = 0;
        for (int i = 0; i < 8 && n < 4; ++i)
            if (lin.eigenvalues[i].imag() > 0)
                om[n++] = lin.eigenvalues[i].imag();
        res_tol = default_res_tol(om);
    }

    try {
        rep.freq = symplectic_diagonalize(lin, e.type, res_tol);
    } catch (const ResonanceError& err) {
        rep.resonances_hit.push_back(
            ResonanceHit{err.nu, err.order, err.value});
        return rep;
    }

    const TaylorExpansion taylor = taylor_hamiltonian(e);
    rep.degree1_residual = taylor.degree1_residual;

    const TruncatedSeries hu = complexify(taylor.series, rep.freq.T);
    const TruncatedSeries h2 = hu.degree_part(2);
    const TruncatedSeries h3 = hu.degree_part(3);
    const TruncatedSeries h4 = hu.degree_part(4);

    // H2 must be sum_j i Omega_j Z_j W_j.
    {
        TruncatedSeries expected(4);
        for (int j = 0; j < 4; ++j) {
            Exponents ex{0, 0, 0, 0, 0, 0, 0, 0};
            ex[j] = 1;
            ex[4 + j] = 1;
            expected.add_term(ex, cdouble(0, rep.freq.Omega[j]));
        }
        rep.h2_form_residual = (h2 - expected).max_abs_coeff() /
                               std::max(1.0, rep.freq.Omega.cwiseAbs().maxCoeff());
    }
    rep.reality_residual =
        std::max(hermitian_residual(h3) / std::max(1.0, h3.max_abs_coeff()),
                 hermitian_residual(h4) / std::max(1.0, h4.max_abs_coeff()));

    rep.spectrum3 = spectrum(h3);

    TruncatedSeries chi1(4);
    try {
        chi1 = homological_solve(rep.freq.Omega, h3, res_tol);
    } catch (const ResonanceError& err) {
        rep.resonances_hit.push_back(
            ResonanceHit{err.nu, err.order, err.value});
        return rep;
    }

    {
        const TruncatedSeries residual =
            poisson_bracket(h2, chi1) - (h3 - average(h3));
        rep.homological_residual =
            residual.max_abs_coeff() / std::max(1e-300, h3.max_abs_coeff());
    }

    const TruncatedSeries h4p = poisson_bracket(chi1, h3) * 0.5 + h4;
    for (const ResonanceVec& nu : spectrum(h4p)) {
        if (nu == ResonanceVec{0, 0, 0, 0})
            continue;
        rep.spectrum4.insert(nu);
        const double dot = rep.freq.Omega[0] * nu[0] + rep.freq.Omega[1] * nu[1] +
                           rep.freq.Omega[2] * nu[2] + rep.freq.Omega[3] * nu[3];
        if (std::abs(dot) <= res_tol)
            rep.resonances_hit.push_back(
                ResonanceHit{nu, order_of(nu), std::abs(dot)});
    }
    if (!rep.resonances_hit.empty())
        return rep;

    const TruncatedSeries h4pp = average(h4p);
    // H''_4 = (1/2) I.A I with I_j = i W_j Z_j, so the coefficient of
    // W_a Z_a W_b Z_b maps to -A_ab (a<b) and -A_aa/2.
    for (int a = 0; a < 4; ++a)
        for (int b = a; b < 4; ++b) {
            Exponents ex{0, 0, 0, 0, 0, 0, 0, 0};
            ex[a] += 1;
            ex[b] += 1;
            ex[4 + a] += 1;
            ex[4 + b] += 1;
            const double f = h4pp.coeff(ex).real();
            if (a == b)
                rep.A(a, a) = -2 * f;
            else {
                rep.A(a, b) = -f;
                rep.A(b, a) = -f;
            }
        }
    rep.constructed = true;
    return rep;
}

std::string to_text(const NormalFormReport& report)
{
    char buf[256];
    std::string out;
    out += "constructed=" + std::to_string(report.constructed ? 1 : 0) + "\n";
    out += "Omega=";
    for (int j = 0; j < 4; ++j) {
        std::snprintf(buf, sizeof buf, " %.17g", report.freq.Omega[j]);
        out += buf;
    }
    out += "\nA=";
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            std::snprintf(buf, sizeof buf, " %.17g", report.A(a, b));
            out += buf;
        }
    out += "\nresonances=";
    std::vector<ResonanceHit> hits = report.resonances_hit;
    std::sort(hits.begin(), hits.end(),
              [](const ResonanceHit& a, const ResonanceHit& b) {
                  return a.nu < b.nu;
              });
    for (const auto& h : hits) {
        std::snprintf(buf, sizeof buf, " (%d,%d,%d,%d|%d)", h.nu[0], h.nu[1],
                      h.nu[2], h.nu[3], h.order);
        out += buf;
    }
    out += "\n";
    return out;
}

} // namespace riemann
