// Command-line scans over the shape triangle: existence regions,
// ellipticity maps, stability classification, resonance curves, and the
// cross-module verification battery.

#include "riemann/scan.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>

using namespace riemann;

namespace {

void add_common_options(CLI::App* cmd, ScanConfig& config, std::string& type,
                        std::string& branch)
{
    cmd->add_option("--type", type, "ellipsoid type: S2, S3, I, II, III");
    cmd->add_option("--branch", branch,
                    "momentum branch: plusminus (default) or minusplus");
    cmd->add_option("--dx", config.dx, "vertical line spacing");
    cmd->add_option("--ppl", config.ppl, "probe points per line");
    cmd->add_option("--xmin", config.xmin, "window: minimum x");
    cmd->add_option("--xmax", config.xmax, "window: maximum x");
    cmd->add_option("--ymin", config.ymin, "window: minimum y");
    cmd->add_option("--ymax", config.ymax, "window: maximum y");
    cmd->add_option("--g", config.g, "gravitational constant");
    cmd->add_option("--tol-ell", config.tol_ell, "ellipticity tolerance");
    cmd->add_option("--res-tol", config.res_tol,
                    "resonance tolerance (<0: 1e-6 |Omega|)");
    cmd->add_option("--classify-tol", config.classify_tol,
                    "definiteness tolerance for the taxonomy");
    cmd->add_option("--kam-tol", config.kam_tol, "KAM determinant tolerance");
    cmd->add_option("--n-theta", config.n_theta,
                    "theta samples on the asymptotic cone");
    cmd->add_option("--threads", config.threads, "parallelism degree");
    cmd->add_option("--out", config.output_path,
                    "CSV output path (default stdout)");
    cmd->add_option("--svg", config.svg_path, "optional SVG raster output");
}

int run_with_output(const ScanConfig& config,
                    const std::function<ScanSummary(std::ostream&)>& fn)
{
    try {
        ScanSummary summary;
        if (config.output_path.empty()) {
            summary = fn(std::cout);
        } else {
            std::ofstream out(config.output_path, std::ios::binary);
            if (!out) {
                std::cerr << "error: cannot open " << config.output_path
                          << "\n";
                return 3;
            }
            summary = fn(out);
            if (!out) {
                std::cerr << "error: write failed on " << config.output_path
                          << "\n";
                return 3;
            }
        }
        std::cerr << "points=" << summary.points
                  << " in_region=" << summary.in_region
                  << " elliptic=" << summary.elliptic
                  << " failures=" << summary.failures;
        if (summary.in_region > 0)
            std::cerr << " elliptic_fraction="
                      << double(summary.elliptic) / summary.in_region;
        std::cerr << "\n";
        return 0;
    } catch (const std::ios_base::failure& ex) {
        std::cerr << "I/O error: " << ex.what() << "\n";
        return 3;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Riemann ellipsoid stability scans"};
    app.set_config("--config", "", "flat key=value configuration file");
    app.require_subcommand(1);

    ScanConfig config;
    std::string type = "S2";
    std::string branch = "plusminus";

    auto* regions = app.add_subcommand("regions", "existence-region CSV");
    auto* ellipticity =
        app.add_subcommand("ellipticity", "per-point spectral verdicts");
    auto* classify =
        app.add_subcommand("classify", "full normal-form classification");
    auto* resonances =
        app.add_subcommand("resonances", "resonance list and curve points");
    auto* verify = app.add_subcommand("verify", "cross-module oracle suite");
    for (CLI::App* cmd : {regions, ellipticity, classify, resonances})
        add_common_options(cmd, config, type, branch);
    resonances->add_option("--max-order", config.max_order,
                           "maximum resonance order");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 1;
    }

    try {
        config.type = ellipsoid_type_from_string(type);
        if (branch == "plusminus")
            config.branch = Branch::PlusMinus;
        else if (branch == "minusplus")
            config.branch = Branch::MinusPlus;
        else
            throw DomainError("unknown branch: " + branch);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }

    if (verify->parsed()) {
        try {
            return run_verify(std::cout) ? 0 : 2;
        } catch (const std::exception& ex) {
            std::cerr << "error: " << ex.what() << "\n";
            return 2;
        }
    }
    if (regions->parsed())
        return run_with_output(config, [&](std::ostream& os) {
            return run_regions(config, os);
        });
    if (ellipticity->parsed())
        return run_with_output(config, [&](std::ostream& os) {
            return run_ellipticity(config, os);
        });
    if (classify->parsed())
        return run_with_output(config, [&](std::ostream& os) {
            return run_classify(config, os);
        });
    if (resonances->parsed())
        return run_with_output(config, [&](std::ostream& os) {
            auto result = run_resonances(config, os);
            std::cerr << "distinct_resonances=" << result.distinct_resonances
                      << " union_spectrum=" << result.union_spectrum.size()
                      << " curve_points=" << result.curve_points.size()
                      << "\n";
            return result.summary;
        });
    return 1;
}
