#include "riemann/scan.hpp"
#include "riemann/potential.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

namespace riemann {

std::string format_g17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<GridPoint> make_grid(const ScanConfig& config)
{
    if (!(config.dx > 0) || config.ppl <= 0)
        throw DomainError("scan grid requires dx > 0 and ppl > 0");
    std::vector<GridPoint> grid;
    const int kmax = static_cast<int>(std::floor(1.0 / config.dx));
    for (int k = 1; k <= kmax; ++k) {
        const double x = k * config.dx;
        if (x <= config.xmin || x >= std::min(config.xmax, 1.0))
            continue;
        for (int j = 0; j < config.ppl; ++j) {
            const double y = x * (j + 0.5) / config.ppl;
            if (y <= config.ymin || y >= config.ymax)
                continue;
            if (!triangle_contains(ShapeCoords{x, y}, 1e-6))
                continue;
            grid.push_back(GridPoint{x, y});
        }
    }
    return grid;
}

namespace {

/// Runs fn over [0, n) on `threads` workers; results land at their own
/// index, so the output is independent of the interleaving.
void parallel_for(size_t n, int threads, const std::function<void(size_t)>& fn)
{
    if (threads <= 1) {
        for (size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= n)
                return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back(worker);
    for (auto& th : pool)
        th.join();
}

std::ofstream open_or_throw(const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::ios_base::failure("cannot open output file: " + path);
    return out;
}

/// Four positive frequencies of an elliptic linearization, descending.
Vec4 omegas_of(const LinearizationReport& lin)
{
    std::vector<double> om;
    for (int i = 0; i < 8; ++i)
        if (lin.eigenvalues[i].imag() > 0)
            om.push_back(lin.eigenvalues[i].imag());
    std::sort(om.rbegin(), om.rend());
    Vec4 v = Vec4::Zero();
    for (size_t i = 0; i < om.size() && i < 4; ++i)
        v[i] = om[i];
    return v;
}

ResonanceVec normalized_nu(ResonanceVec nu)
{
    for (int i = 0; i < 4; ++i) {
        if (nu[i] > 0)
            break;
        if (nu[i] < 0) {
            for (int j = 0; j < 4; ++j)
                nu[j] = -nu[j];
            break;
        }
    }
    return nu;
}

} // namespace

ScanSummary run_regions(const ScanConfig& config, std::ostream& csv)
{
    const std::vector<GridPoint> grid = make_grid(config);
    std::vector<std::string> rows(grid.size());
    std::vector<char> inreg(grid.size(), 0);

    const char* overlay_header = nullptr;
    switch (config.type) {
    case EllipsoidType::S2: overlay_header = "gs_minus,gs_plus,gtilde"; break;
    case EllipsoidType::S3: overlay_header = "gs_plus_132,gs_minus_132"; break;
    case EllipsoidType::I: overlay_header = "lin_margin,irrot_quartic"; break;
    case EllipsoidType::II:
        overlay_header = "lin_margin,dfun_132,zero_pressure";
        break;
    case EllipsoidType::III: overlay_header = "lin_margin,gtilde"; break;
    }

    parallel_for(grid.size(), config.threads, [&](size_t i) {
        const auto [x, y] = grid[i];
        std::string row = format_g17(x) + "," + format_g17(y);
        try {
            const SemiAxes b = from_shape_coords(ShapeCoords{x, y});
            const bool in = region_contains(config.type, b, config.g);
            inreg[i] = in;
            row += in ? ",1" : ",0";
            const double b1 = b.b1, b2 = b.b2, b3 = b.b3();
            std::vector<double> overlays;
            switch (config.type) {
            case EllipsoidType::S2:
                overlays = {gs_minus(b1, b2, b3, config.g),
                            gs_plus(b1, b2, b3, config.g),
                            gtilde(b1, b2, b3, config.g)};
                break;
            case EllipsoidType::S3:
                overlays = {gs_plus(b1, b3, b2, config.g),
                            gs_minus(b1, b3, b2, config.g)};
                break;
            case EllipsoidType::I:
                overlays = {2 * b2 - b3 - b1,
                            b1 * b1 * b2 * b2 + b1 * b1 * b3 * b3 +
                                b2 * b2 * b3 * b3 - 3 * std::pow(b2, 4)};
                break;
            case EllipsoidType::II:
                overlays = {b1 - 2 * b2 - b3, dfun(b1, b3, b2),
                            zero_pressure(b, config.g)};
                break;
            case EllipsoidType::III:
                overlays = {b1 - b2 - 2 * b3, gtilde(b1, b2, b3, config.g)};
                break;
            }
            for (double v : overlays)
                row += "," + format_g17(v);
        } catch (const std::exception&) {
            row += ",0,error";
        }
        rows[i] = row;
    });

    csv << "x,y,in_region," << overlay_header << "\n";
    ScanSummary summary;
    summary.points = grid.size();
    for (size_t i = 0; i < grid.size(); ++i) {
        csv << rows[i] << "\n";
        summary.in_region += inreg[i];
    }
    if (!config.svg_path.empty()) {
        std::vector<bool> mask(inreg.begin(), inreg.end());
        write_svg(config.svg_path, config, grid, mask);
    }
    return summary;
}

ScanSummary run_ellipticity(const ScanConfig& config, std::ostream& csv)
{
    const std::vector<GridPoint> grid = make_grid(config);
    std::vector<std::string> rows(grid.size());
    std::vector<int> state(grid.size(), 0); // 0 skip, 1 ok, 2 failure
    std::vector<char> ell(grid.size(), 0);

    parallel_for(grid.size(), config.threads, [&](size_t i) {
        const auto [x, y] = grid[i];
        SemiAxes b;
        try {
            b = from_shape_coords(ShapeCoords{x, y});
            if (!region_contains(config.type, b, config.g))
                return;
        } catch (const std::exception&) {
            return;
        }
        std::string row = format_g17(x) + "," + format_g17(y);
        try {
            const EquilibriumPoint e =
                make_equilibrium(config.type, b, config.branch, config.g);
            const LinearizationReport lin = linearize(e, config.tol_ell);
            double max_re = 0;
            for (int k = 0; k < 8; ++k)
                max_re = std::max(max_re, std::abs(lin.eigenvalues[k].real()));
            const Vec4 om = omegas_of(lin);
            row += ",ok,";
            row += lin.elliptic ? "1" : "0";
            row += ",";
            row += lin.margin_flag ? "1" : "0";
            row += "," + std::to_string(lin.zero_modes);
            row += "," + format_g17(max_re);
            for (int k = 0; k < 4; ++k)
                row += "," + format_g17(om[k]);
            state[i] = 1;
            ell[i] = lin.elliptic;
        } catch (const std::exception& ex) {
            row += ",error:";
            std::string what = ex.what();
            for (char& c : what)
                if (c == ',' || c == '\n')
                    c = ';';
            row += what + ",,,,,,,,";
            state[i] = 2;
        }
        rows[i] = row;
    });

    csv << "x,y,status,elliptic,margin_flag,zero_modes,max_abs_re,"
           "omega1,omega2,omega3,omega4\n";
    ScanSummary summary;
    summary.points = grid.size();
    for (size_t i = 0; i < grid.size(); ++i) {
        if (state[i] == 0)
            continue;
        csv << rows[i] << "\n";
        summary.in_region += 1;
        summary.elliptic += ell[i];
        summary.failures += state[i] == 2;
    }
    return summary;
}

namespace {

struct ClassifyCell {
    int state = 0; // 0 skip, 1 ok, 2 failure
    bool elliptic = false;
    bool constructed = false;
    std::string row;
    Vec4 omega = Vec4::Zero();
    std::set<ResonanceVec> spectrum;
};

ClassifyCell classify_point(const ScanConfig& config, double x, double y)
{
    ClassifyCell cell;
    SemiAxes b;
    try {
        b = from_shape_coords(ShapeCoords{x, y});
        if (!region_contains(config.type, b, config.g))
            return cell;
    } catch (const std::exception&) {
        return cell;
    }
    std::string row = format_g17(x) + "," + format_g17(y);
    try {
        const EquilibriumPoint e =
            make_equilibrium(config.type, b, config.branch, config.g);
        const LinearizationReport lin = linearize(e, config.tol_ell);
        cell.state = 1;
        cell.elliptic = lin.elliptic;
        if (!lin.elliptic) {
            row += ",ok,0,0,NotElliptic,0,0,0";
            for (int k = 0; k < 9; ++k)
                row += ",0";
            row += ",0;0;0;0";
            cell.row = row;
            return cell;
        }
        const NormalFormReport rep = birkhoff_order4(e, config.res_tol);
        cell.constructed = rep.constructed;
        cell.omega = rep.freq.omega;
        for (const auto& nu : rep.spectrum3)
            cell.spectrum.insert(normalized_nu(nu));
        for (const auto& nu : rep.spectrum4)
            cell.spectrum.insert(normalized_nu(nu));
        const StabilityClass cls =
            classify_normal_form(rep, config.classify_tol, config.n_theta);

        // Nearest resonance among this point's own spectra.
        double min_res = std::numeric_limits<double>::infinity();
        ResonanceVec min_nu{0, 0, 0, 0};
        for (const auto& nu : cell.spectrum) {
            if (order_of(nu) > config.max_order)
                continue;
            const double dot = rep.freq.omega[0] * nu[0] +
                               rep.freq.omega[1] * nu[1] +
                               rep.freq.omega[2] * nu[2] +
                               rep.freq.omega[3] * nu[3];
            if (std::abs(dot) < min_res) {
                min_res = std::abs(dot);
                min_nu = nu;
            }
        }
        row += ",ok,1," + std::string(rep.constructed ? "1" : "0");
        row += ",";
        row += to_string(cls.tag);
        row += "," + std::to_string(cls.resonance_order);
        row += ",";
        row += cls.kam_nondegenerate ? "1" : "0";
        row += "," + format_g17(rep.constructed ? rep.A.determinant() : 0.0);
        for (int k = 0; k < 4; ++k)
            row += "," + format_g17(rep.freq.omega[k]);
        for (int k = 0; k < 4; ++k)
            row += "," + format_g17(rep.freq.Omega[k]);
        row += "," + format_g17(std::isfinite(min_res) ? min_res : 0.0);
        row += "," + std::to_string(min_nu[0]) + ";" +
               std::to_string(min_nu[1]) + ";" + std::to_string(min_nu[2]) +
               ";" + std::to_string(min_nu[3]);
        cell.row = row;
    } catch (const std::exception& ex) {
        cell.state = 2;
        std::string what = ex.what();
        for (char& c : what)
            if (c == ',' || c == '\n')
                c = ';';
        row += ",error:" + what;
        cell.row = row;
    }
    return cell;
}

const char* kClassifyHeader =
    "x,y,status,elliptic,constructed,class,resonance_order,kam,detA,"
    "omega1,omega2,omega3,omega4,Omega1,Omega2,Omega3,Omega4,"
    "min_res,min_res_nu";

} // namespace

ScanSummary run_classify(const ScanConfig& config, std::ostream& csv)
{
    const std::vector<GridPoint> grid = make_grid(config);
    std::vector<ClassifyCell> cells(grid.size());
    parallel_for(grid.size(), config.threads, [&](size_t i) {
        cells[i] = classify_point(config, grid[i].x, grid[i].y);
    });

    csv << kClassifyHeader << "\n";
    ScanSummary summary;
    summary.points = grid.size();
    for (const auto& cell : cells) {
        if (cell.state == 0)
            continue;
        csv << cell.row << "\n";
        summary.in_region += 1;
        summary.elliptic += cell.elliptic;
        summary.failures += cell.state == 2;
    }
    return summary;
}

ResonanceScanResult run_resonances(const ScanConfig& config, std::ostream& csv)
{
    ResonanceScanResult result;
    // Pass 1: per-line frequency samples and the union spectrum.
    struct LinePoint {
        double y;
        Vec4 omega;
    };
    std::vector<double> xs;
    const int kmax = static_cast<int>(std::floor(1.0 / config.dx));
    for (int k = 1; k <= kmax; ++k) {
        const double x = k * config.dx;
        if (x > config.xmin && x < std::min(config.xmax, 1.0))
            xs.push_back(x);
    }
    std::vector<std::vector<LinePoint>> lines(xs.size());
    std::vector<std::set<ResonanceVec>> spectra(xs.size());
    std::atomic<size_t> in_region{0}, failures{0};

    parallel_for(xs.size(), config.threads, [&](size_t li) {
        const double x = xs[li];
        for (int j = 0; j < config.ppl; ++j) {
            const double y = x * (j + 0.5) / config.ppl;
            if (y <= config.ymin || y >= config.ymax ||
                !triangle_contains(ShapeCoords{x, y}, 1e-6))
                continue;
            const ClassifyCell cell = classify_point(config, x, y);
            if (cell.state == 0)
                continue;
            in_region.fetch_add(1);
            if (cell.state == 2) {
                failures.fetch_add(1);
                continue;
            }
            if (!cell.elliptic)
                continue;
            for (const auto& nu : cell.spectrum)
                if (order_of(nu) <= config.max_order)
                    spectra[li].insert(nu);
            lines[li].push_back(LinePoint{y, cell.omega});
        }
    });
    for (const auto& sp : spectra)
        result.union_spectrum.insert(sp.begin(), sp.end());
    result.union_spectrum.erase(ResonanceVec{0, 0, 0, 0});
    result.summary.points = 0;
    result.summary.in_region = in_region.load();
    result.summary.failures = failures.load();

    // Frequencies at one refined point; empty when the pipeline fails.
    auto omega_at = [&](double x, double y) -> std::optional<Vec4> {
        try {
            const SemiAxes b = from_shape_coords(ShapeCoords{x, y});
            if (!region_contains(config.type, b, config.g))
                return std::nullopt;
            const EquilibriumPoint e =
                make_equilibrium(config.type, b, config.branch, config.g);
            const LinearizationReport lin = linearize(e, config.tol_ell);
            if (!lin.elliptic)
                return std::nullopt;
            return omegas_of(lin);
        } catch (const std::exception&) {
            return std::nullopt;
        }
    };

    // Pass 2: zero crossings of w.nu between consecutive points of each
    // line, refined by bisection in y.
    std::set<ResonanceVec> seen;
    for (const ResonanceVec& nu : result.union_spectrum) {
        auto dot = [&](const Vec4& om) {
            return om[0] * nu[0] + om[1] * nu[1] + om[2] * nu[2] +
                   om[3] * nu[3];
        };
        for (size_t li = 0; li < xs.size(); ++li) {
            const auto& line = lines[li];
            for (size_t k = 1; k < line.size(); ++k) {
                const double f0 = dot(line[k - 1].omega);
                const double f1 = dot(line[k].omega);
                if (f0 == 0 || f0 * f1 > 0)
                    continue;
                double ylo = line[k - 1].y, yhi = line[k].y, flo = f0;
                for (int it = 0; it < 40 && yhi - ylo > 1e-10; ++it) {
                    const double ym = 0.5 * (ylo + yhi);
                    const auto om = omega_at(xs[li], ym);
                    if (!om)
                        break;
                    const double fm = dot(*om);
                    if (fm == 0) {
                        ylo = yhi = ym;
                        break;
                    }
                    if (flo * fm < 0)
                        yhi = ym;
                    else {
                        ylo = ym;
                        flo = fm;
                    }
                }
                seen.insert(nu);
                result.curve_points.push_back(ResonanceCurvePoint{
                    nu, order_of(nu), xs[li], 0.5 * (ylo + yhi)});
            }
        }
    }
    result.distinct_resonances = static_cast<int>(seen.size());

    csv << "nu1,nu2,nu3,nu4,order,x,y\n";
    std::sort(result.curve_points.begin(), result.curve_points.end(),
              [](const ResonanceCurvePoint& a, const ResonanceCurvePoint& b) {
                  if (a.nu != b.nu)
                      return a.nu < b.nu;
                  if (a.x != b.x)
                      return a.x < b.x;
                  return a.y < b.y;
              });
    for (const auto& p : result.curve_points)
        csv << p.nu[0] << "," << p.nu[1] << "," << p.nu[2] << "," << p.nu[3]
            << "," << p.order << "," << format_g17(p.x) << ","
            << format_g17(p.y) << "\n";
    return result;
}

void write_svg(const std::string& path, const ScanConfig& config,
               const std::vector<GridPoint>& points,
               const std::vector<bool>& in_region)
{
    std::ofstream svg = open_or_throw(path);
    const double w = config.dx, h = 1.0 / config.ppl;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1 1\">\n"
        << "<rect width=\"1\" height=\"1\" fill=\"white\"/>\n";
    for (size_t i = 0; i < points.size(); ++i) {
        if (!in_region[i])
            continue;
        svg << "<rect x=\"" << points[i].x - w / 2 << "\" y=\""
            << 1.0 - points[i].y - h / 2 << "\" width=\"" << w
            << "\" height=\"" << h << "\" fill=\"#888888\"/>\n";
    }
    svg << "</svg>\n";
    if (!svg)
        throw std::ios_base::failure("failed writing SVG: " + path);
}

namespace {

/// Deterministic interior sample points of a region, kept away from the
/// boundary so finite-difference stencils stay inside.
std::vector<SemiAxes> region_samples(EllipsoidType type, size_t count,
                                     double g, uint32_t seed = 20260809)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(0, 1);
    std::vector<SemiAxes> out;
    for (int tries = 0; tries < 2000000 && out.size() < count; ++tries) {
        const double x = uni(rng), y = uni(rng) * x;
        if (!triangle_contains(ShapeCoords{x, y}, 5e-3))
            continue;
        bool interior = true;
        for (double ddx : {-8e-3, 0.0, 8e-3}) {
            for (double ddy : {-8e-3, 0.0, 8e-3}) {
                ShapeCoords probe{x + ddx, y + ddy};
                try {
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
    if (out.size() < count)
        throw DomainError("could not sample enough interior region points");
    return out;
}

struct Check {
    std::string name;
    bool pass;
    std::string detail;
};

} // namespace

bool run_verify(std::ostream& out)
{
    std::vector<Check> checks;
    auto add = [&](const std::string& name, bool pass,
                   const std::string& detail) {
        checks.push_back(Check{name, pass, detail});
    };
    const EllipsoidType types[] = {EllipsoidType::S2, EllipsoidType::S3,
                                   EllipsoidType::I, EllipsoidType::II,
                                   EllipsoidType::III};

    // Critical-point residuals per type.
    for (EllipsoidType t : types) {
        double worst_g = 0, worst_t = 0;
        bool ok = true;
        try {
            for (const SemiAxes& b : region_samples(t, 3, 1.0)) {
                const auto e = make_equilibrium(t, b);
                const auto r = critical_point_residual(e);
                worst_g = std::max(worst_g, r.grad_b_norm);
                worst_t = std::max(worst_t, r.torque_norm);
            }
            ok = worst_g <= 1e-6 && worst_t <= 1e-6;
        } catch (const std::exception& ex) {
            ok = false;
        }
        add(std::string("critical_point_residual[") + to_string(t) + "]", ok,
            "grad " + format_g17(worst_g) + " torque " + format_g17(worst_t));
    }

    // Chart symplecticity (finite differences against the sphere form).
    {
        const PoincareChart chart =
            make_poincare_chart(Vec3(0.4, 0.0, 0.9), 1);
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> uni(-0.5, 0.5);
        double worst = 0;
        for (int trial = 0; trial < 100; ++trial) {
            const double q = uni(rng), p = uni(rng);
            if (q * q + p * p >= 1.8 * chart.rho)
                continue;
            const double h = 1e-6;
            const Vec3 dq =
                (poincare_embed(chart, q + h, p) - poincare_embed(chart, q - h, p)) /
                (2 * h);
            const Vec3 dp =
                (poincare_embed(chart, q, p + h) - poincare_embed(chart, q, p - h)) /
                (2 * h);
            const Vec3 m = poincare_embed(chart, q, p);
            const Vec3 w1(uni(rng), uni(rng), uni(rng));
            const Vec3 w2(uni(rng), uni(rng), uni(rng));
            const Vec3 v1 = m.cross(w1), v2 = m.cross(w2);
            // components in the chart basis
            Eigen::Matrix<double, 3, 2> jac;
            jac.col(0) = dq;
            jac.col(1) = dp;
            const Vec2 a1 = jac.colPivHouseholderQr().solve(v1);
            const Vec2 a2 = jac.colPivHouseholderQr().solve(v2);
            const double form = a1[1] * a2[0] - a1[0] * a2[1]; // dp^dq
            worst = std::max(worst,
                             std::abs(form - (-m.dot(w1.cross(w2)))));
        }
        add("poincare_chart_symplecticity_fd", worst <= 1e-7,
            "max residual " + format_g17(worst));
    }

    // Hessian block structure (Lemma-type zero blocks) per type.
    for (EllipsoidType t : types) {
        bool ok = true;
        double worst = 0;
        try {
            for (const SemiAxes& b : region_samples(t, 3, 1.0)) {
                const auto rep = hessian_at_equilibrium(make_equilibrium(t, b));
                worst = std::max(worst, rep.block_residual);
            }
        } catch (const std::exception&) {
            ok = false;
        }
        add(std::string("hessian_blocks[") + to_string(t) + "]",
            ok && worst <= 1e-9, "residual " + format_g17(worst));
    }

    // FD Hessian against the analytic assembly, one point per type.
    for (EllipsoidType t : types) {
        bool ok = true;
        double worst = 0;
        try {
            const SemiAxes b = region_samples(t, 1, 1.0)[0];
            const auto e = make_equilibrium(t, b);
            const Mat8 analytic = hessian_at_equilibrium(e).hessian;
            Mat8 fd;
            for (int i = 0; i < 8; ++i)
                for (int j = 0; j < 8; ++j) {
                    auto stencil = [&](double h) {
                        auto eval = [&](double si, double sj) {
                            Vec8 yv = Vec8::Zero();
                            yv[i] += si * h;
                            yv[j] += sj * h;
                            return reduced_hamiltonian(
                                e, Vec2(yv[0], yv[1]), Vec2(yv[2], yv[3]),
                                Vec2(yv[4], yv[5]), Vec2(yv[6], yv[7]));
                        };
                        return (eval(1, 1) - eval(1, -1) - eval(-1, 1) +
                                eval(-1, -1)) /
                               (4 * h * h);
                    };
                    // Richardson pair kills the h^2 truncation term.
                    const double h = 2e-4;
                    fd(i, j) = (4 * stencil(h / 2) - stencil(h)) / 3;
                }
            const double scale = analytic.cwiseAbs().maxCoeff();
            worst = (fd - analytic).cwiseAbs().maxCoeff() / scale;
            ok = worst <= 1e-6;
        } catch (const std::exception&) {
            ok = false;
        }
        add(std::string("fd_hessian[") + to_string(t) + "]", ok,
            "relative " + format_g17(worst));
    }

    // Normal-form identities at one elliptic point per type.
    const std::pair<EllipsoidType, ShapeCoords> nf_points[] = {
        {EllipsoidType::S2, {0.52, 0.40}},
        {EllipsoidType::S3, {0.60, 0.30}},
        {EllipsoidType::I, {0.90, 0.60}},
        {EllipsoidType::II, {0.04, 0.033}},
        {EllipsoidType::III, {0.08, 0.04}},
    };
    for (const auto& [t, xy] : nf_points) {
        bool ok = false;
        std::string detail = "pipeline failed";
        try {
            const auto e = make_equilibrium(t, from_shape_coords(xy));
            const auto rep = birkhoff_order4(e);
            if (rep.constructed) {
                const Mat8 j8 = symplectic_structure();
                const double sr = (rep.freq.T.transpose() * j8 * rep.freq.T - j8)
                                      .cwiseAbs()
                                      .maxCoeff();
                ok = sr <= 1e-9 && rep.homological_residual <= 1e-10 &&
                     rep.h2_form_residual <= 1e-9;
                detail = "TJT " + format_g17(sr) + " hom " +
                         format_g17(rep.homological_residual);
            }
        } catch (const std::exception& ex) {
            detail = ex.what();
        }
        add(std::string("normal_form_identities[") + to_string(t) + "]", ok,
            detail);
    }

    // Empty sets of the critical-point analysis; region predicates agree
    // with the radicand-based membership on samples.
    {
        std::mt19937 rng(99);
        std::uniform_real_distribution<double> uni(0, 1);
        int bad_empty = 0, bad_match = 0, tested = 0;
        auto b_tilde = [&](const SemiAxes& b, int j) {
            // {GS-(b1,bj,bk) >= 0 and GS+(b1,bj,bk) >= 0}, (j,k) perm of (2,3)
            const double bj = j == 2 ? b.b2 : b.b3();
            const double bk = j == 2 ? b.b3() : b.b2;
            return gs_minus(b.b1, bj, bk) >= 0 && gs_plus(b.b1, bj, bk) >= 0;
        };
        auto b_pm = [&](const SemiAxes& b, int i, int j, int sign) {
            const double bv[3] = {b.b1, b.b2, b.b3()};
            const int k = 3 - i - j; // indices 0-based
            const double bi = bv[i], bj = bv[j], bk = bv[k];
            if (!(bj <= sign * (bi - 2 * bk)))
                return false;
            if (dfun(bi, bj, bk) == 0)
                return false;
            const double gm = sign > 0 ? gr_minus(bi, bj, bk) : gr_plus(bi, bj, bk);
            const double gp = sign > 0 ? gr_plus(bj, bi, bk) : gr_minus(bj, bi, bk);
            return gm > 0 && gp > 0;
        };
        for (int n = 0; n < 10000; ++n) {
            const double x = uni(rng), y = uni(rng) * x;
            if (!triangle_contains(ShapeCoords{x, y}, 1e-3))
                continue;
            SemiAxes b;
            try {
                b = from_shape_coords(ShapeCoords{x, y});
            } catch (const std::exception&) {
                continue;
            }
            ++tested;
            try {
                // B+23, B-23, B-12 must be empty.
                if (b_pm(b, 1, 2, +1) || b_pm(b, 1, 2, -1) || b_pm(b, 0, 1, -1))
                    ++bad_empty;
                // identities with the region predicates
                if (b_tilde(b, 2) != region_contains(EllipsoidType::S2, b))
                    ++bad_match;
                if (b_tilde(b, 3) != region_contains(EllipsoidType::S3, b))
                    ++bad_match;
                if (b_pm(b, 0, 2, -1) != region_contains(EllipsoidType::I, b))
                    ++bad_match;
                if (b_pm(b, 0, 2, +1) != region_contains(EllipsoidType::II, b))
                    ++bad_match;
                if (b_pm(b, 0, 1, +1) != region_contains(EllipsoidType::III, b))
                    ++bad_match;
            } catch (const std::exception&) {
                // boundary roundoff in a radicand; skip the sample
            }
        }
        add("emptiness_and_region_identities",
            bad_empty == 0 && bad_match <= tested / 1000,
            "samples " + std::to_string(tested) + " empty-violations " +
                std::to_string(bad_empty) + " mismatches " +
                std::to_string(bad_match));
    }

    // Scaling in g: V and momenta rescale, verdicts unchanged.
    {
        bool ok = true;
        std::string detail;
        try {
            const SemiAxes b = from_shape_coords(ShapeCoords{0.9, 0.6});
            const double v1 = potential_v(b, 1.0), v2 = potential_v(b, 2.0);
            ok = std::abs(v2 - 2 * v1) <= 1e-9 * std::abs(v1);
            const auto e1 = make_equilibrium(EllipsoidType::I, b, Branch::PlusMinus, 1.0);
            const auto e2 = make_equilibrium(EllipsoidType::I, b, Branch::PlusMinus, 2.0);
            const double scale = std::sqrt(2.0);
            ok = ok && (e2.M.m_l - scale * e1.M.m_l).norm() <= 1e-9 &&
                 (e2.M.m_r - scale * e1.M.m_r).norm() <= 1e-9;
            const auto c1 = classify_normal_form(birkhoff_order4(e1));
            const auto c2 = classify_normal_form(birkhoff_order4(e2));
            ok = ok && c1.tag == c2.tag &&
                 c1.kam_nondegenerate == c2.kam_nondegenerate;
            detail = std::string("tags ") + to_string(c1.tag) + "/" +
                     to_string(c2.tag);
        } catch (const std::exception& ex) {
            ok = false;
            detail = ex.what();
        }
        add("g_scaling", ok, detail);
    }

    bool all = true;
    for (const auto& c : checks) {
        out << (c.pass ? "PASS  " : "FAIL  ") << c.name << "  (" << c.detail
            << ")\n";
        all = all && c.pass;
    }
    out << (all ? "verify: all checks passed\n" : "verify: FAILURES\n");
    return all;
}

} // namespace riemann
