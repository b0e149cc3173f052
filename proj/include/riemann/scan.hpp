#pragma once

#include "riemann/classify.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace riemann {

/// Grid scans over the shape triangle.  The mesh is organized as
/// vertical lines spaced dx apart with ppl probe points per line; an
/// optional window restricts both coordinates.
struct ScanConfig {
    EllipsoidType type = EllipsoidType::S2;
    Branch branch = Branch::PlusMinus;
    double dx = 0.005;
    int ppl = 100;
    double xmin = 0.0;
    double xmax = 1.0;
    double ymin = 0.0;
    double ymax = 1.0;
    double g = 1.0;
    double tol_ell = kEllipticityTol;
    double res_tol = -1; // < 0: default_res_tol(Omega)
    double classify_tol = 1e-9;
    double kam_tol = 1e-10;
    int n_theta = kDefaultNTheta;
    int max_order = 4;
    int threads = 1;
    std::string output_path; // empty: stdout
    std::string svg_path;    // empty: no SVG
};

struct GridPoint {
    double x = 0;
    double y = 0;
};

/// Deterministic probe set: lines x = k dx inside the window, points
/// y = x (j+1/2)/ppl filtered to the window and the open triangle.
std::vector<GridPoint> make_grid(const ScanConfig& config);

struct ScanSummary {
    size_t points = 0;
    size_t in_region = 0;
    size_t elliptic = 0;
    size_t failures = 0;
};

/// %.17g: floats at 17 significant digits for the CSV interfaces.
std::string format_g17(double v);

ScanSummary run_regions(const ScanConfig& config, std::ostream& csv);
ScanSummary run_ellipticity(const ScanConfig& config, std::ostream& csv);
ScanSummary run_classify(const ScanConfig& config, std::ostream& csv);

struct ResonanceCurvePoint {
    ResonanceVec nu{};
    int order = 0;
    double x = 0;
    double y = 0;
};

struct ResonanceScanResult {
    ScanSummary summary;
    std::set<ResonanceVec> union_spectrum;
    std::vector<ResonanceCurvePoint> curve_points;
    int distinct_resonances = 0;
};

/// Union spectra over the grid, zero/sign-change detection of w.nu along
/// the vertical lines, bisection refinement of each crossing.
ResonanceScanResult run_resonances(const ScanConfig& config,
                                   std::ostream& csv);

/// Cross-module oracle battery; prints one PASS/FAIL line per check.
bool run_verify(std::ostream& out);

/// Shaded raster of the in-region points (no interactivity).
void write_svg(const std::string& path, const ScanConfig& config,
               const std::vector<GridPoint>& points,
               const std::vector<bool>& in_region);

} // namespace riemann
