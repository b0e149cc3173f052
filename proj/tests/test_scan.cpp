#include "riemann/scan.hpp"

#include <doctest.h>
#include <fstream>
#include <sstream>

using namespace riemann;

TEST_SUITE_BEGIN("scan");

TEST_CASE("grid generation is deterministic and windowed")
{
    ScanConfig config;
    config.dx = 0.1;
    config.ppl = 10;
    const auto g1 = make_grid(config);
    const auto g2 = make_grid(config);
    REQUIRE(g1.size() == g2.size());
    for (size_t i = 0; i < g1.size(); ++i) {
        CHECK(g1[i].x == g2[i].x);
        CHECK(g1[i].y == g2[i].y);
    }
    for (const auto& p : g1) {
        CHECK(p.y < p.x);
        CHECK(p.x < 1);
    }
    ScanConfig windowed = config;
    windowed.xmin = 0.45;
    windowed.xmax = 0.65;
    for (const auto& p : make_grid(windowed)) {
        CHECK(p.x > 0.45);
        CHECK(p.x < 0.65);
    }
    ScanConfig bad = config;
    bad.dx = 0;
    CHECK_THROWS_AS(make_grid(bad), DomainError);
}

TEST_CASE("float formatting uses 17 significant digits")
{
    CHECK(format_g17(2.0 / 3.0) == "0.66666666666666663");
    CHECK(format_g17(1.0) == "1");
}

TEST_CASE("region scan of type I matches the half-triangle rule")
{
    ScanConfig config;
    config.type = EllipsoidType::I;
    config.dx = 0.05;
    config.ppl = 12;
    std::ostringstream csv;
    const ScanSummary summary = run_regions(config, csv);
    CHECK(summary.points > 0);
    CHECK(summary.in_region > 0);

    std::istringstream in(csv.str());
    std::string line;
    std::getline(in, line); // header
    CHECK(line.rfind("x,y,in_region", 0) == 0);
    size_t rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        std::istringstream fields(line);
        std::string sx, sy, sin;
        std::getline(fields, sx, ',');
        std::getline(fields, sy, ',');
        std::getline(fields, sin, ',');
        const double x = std::stod(sx), y = std::stod(sy);
        const bool expected = 1 <= 2 * x - y; // b1 <= 2 b2 - b3, scaled by b1
        CHECK(sin == (expected ? "1" : "0"));
    }
    CHECK(rows == summary.points);
    // LF endings only
    CHECK(csv.str().find('\r') == std::string::npos);
}

TEST_CASE("classify scan is byte-identical between serial and parallel")
{
    ScanConfig config;
    config.type = EllipsoidType::S3;
    config.dx = 0.05;
    config.ppl = 6;
    config.threads = 1;
    std::ostringstream serial;
    run_classify(config, serial);
    config.threads = 4;
    std::ostringstream parallel;
    run_classify(config, parallel);
    CHECK(serial.str() == parallel.str());
    CHECK(serial.str().find("DirectionallyQuasiConvex") != std::string::npos);
}

TEST_CASE("scan records failures without aborting")
{
    // x -> 1 approaches b1 = b2 where the mass matrix is singular.
    ScanConfig config;
    config.type = EllipsoidType::S3;
    config.dx = 0.0005;
    config.ppl = 4;
    config.xmin = 0.9985;
    std::ostringstream csv;
    const ScanSummary summary = run_ellipticity(config, csv);
    CHECK(summary.in_region > 0);
    CHECK(summary.failures > 0);
    CHECK(csv.str().find("error:") != std::string::npos);
}

TEST_CASE("resonance scan emits curve points on a small window")
{
    ScanConfig config;
    config.type = EllipsoidType::S3;
    config.dx = 0.02;
    config.ppl = 24;
    config.xmin = 0.55;
    config.xmax = 0.75;
    config.threads = 2;
    std::ostringstream csv;
    const ResonanceScanResult result = run_resonances(config, csv);
    CHECK(result.union_spectrum.size() > 0);
    // the CSV is sorted and parseable
    std::istringstream in(csv.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "nu1,nu2,nu3,nu4,order,x,y");
    for (const auto& p : result.curve_points) {
        CHECK(p.order >= 1);
        CHECK(p.order <= config.max_order);
        CHECK(p.x > config.xmin);
        CHECK(p.y < p.x);
    }
}

TEST_CASE("svg smoke test")
{
    ScanConfig config;
    config.type = EllipsoidType::I;
    config.dx = 0.1;
    config.ppl = 8;
    config.svg_path = "scan_test_out.svg";
    std::ostringstream csv;
    run_regions(config, csv);
    std::ifstream svg(config.svg_path);
    REQUIRE(svg.good());
    std::stringstream content;
    content << svg.rdbuf();
    CHECK(content.str().find("<svg") != std::string::npos);
    CHECK(content.str().find("<rect") != std::string::npos);
    std::remove(config.svg_path.c_str());
}

TEST_SUITE_END();
