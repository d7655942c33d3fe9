#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "capflow/emit.hpp"

using namespace capflow;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

RunResult circle_run() {
    FlowConfig cfg;
    cfg.n_theta = 64;
    cfg.m_s = 32;
    cfg.dt = 1e-3;
    cfg.t_end = 0.02;
    cfg.output_every = 10;
    return run_flow(PolarCurve::circle(64, 3.0), cfg, false);
}

}  // namespace

TEST_CASE("Time series CSV layout and values") {
    const RunResult run = circle_run();
    REQUIRE(run.samples.size() == 3);  // t = 0, 0.01, 0.02

    std::ostringstream os;
    emit_time_series(run.samples, os);
    const std::string text = os.str();
    REQUIRE(text.back() == '\n');

    std::istringstream in(text);
    std::string line;
    REQUIRE(std::getline(in, line));
    REQUIRE(line ==
            "t,min_rho,max_rho,area,length,min_condition,max_abs_unu,lipschitz_norm,"
            "dist_to_Ropt");

    int rows = 0;
    while (std::getline(in, line)) {
        const auto fields = split(line, ',');
        REQUIRE(fields.size() == 9);
        if (rows == 0) {
            REQUIRE(std::stod(fields[0]) == 0.0);
            REQUIRE(std::stod(fields[1]) == 3.0);
            REQUIRE(std::stod(fields[2]) == 3.0);
            REQUIRE_THAT(std::stod(fields[3]), WithinAbs(9.0 * std::numbers::pi, 1e-9));
            REQUIRE_THAT(std::stod(fields[4]), WithinAbs(6.0 * std::numbers::pi, 1e-9));
            // Radial values: H - u_nu^2 = 1/3 - 1/(3 log 3)^2, dist = 3 - R_opt.
            REQUIRE_THAT(std::stod(fields[5]), WithinAbs(0.241273838923, 1e-4));
            REQUIRE_THAT(std::stod(fields[6]), WithinAbs(0.303413075542, 2e-4));
            REQUIRE_THAT(std::stod(fields[7]), WithinAbs(0.0, 1e-11));
            REQUIRE_THAT(std::stod(fields[8]), WithinAbs(0.979252641388, 1e-9));

            // Floats are printed at 12 significant digits: reprinting the
            // parsed value reproduces the text exactly.
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.12g", std::stod(fields[5]));
            REQUIRE(fields[5] == buf);
        }
        ++rows;
    }
    REQUIRE(rows == 3);
}

TEST_CASE("Snapshot CSV has one row per node with radial values") {
    const RunResult run = circle_run();
    std::ostringstream os;
    emit_snapshot(run.samples.front(), os);
    std::istringstream in(os.str());
    std::string line;
    REQUIRE(std::getline(in, line));
    REQUIRE(line == "theta,rho,H,u_nu");
    int rows = 0;
    while (std::getline(in, line)) {
        const auto fields = split(line, ',');
        REQUIRE(fields.size() == 4);
        REQUIRE_THAT(std::stod(fields[1]), WithinAbs(3.0, 1e-12));
        REQUIRE_THAT(std::stod(fields[2]), WithinAbs(1.0 / 3.0, 1e-12));
        REQUIRE_THAT(std::stod(fields[3]), WithinAbs(-0.303413075542, 2e-4));
        ++rows;
    }
    REQUIRE(rows == 64);
}

TEST_CASE("Snapshot SVG draws the curve and both reference circles") {
    const RunResult run = circle_run();
    std::ostringstream os;
    emit_snapshot_svg(run.samples.back(), os);
    const std::string svg = os.str();
    REQUIRE(svg.rfind("<svg", 0) == 0);
    REQUIRE(svg.find("polygon") != std::string::npos);
    REQUIRE(svg.find("2.02074735861") != std::string::npos);  // stationary radius
    std::size_t circles = 0, pos = 0;
    while ((pos = svg.find("<circle", pos)) != std::string::npos) {
        ++circles;
        ++pos;
    }
    REQUIRE(circles == 2);
    REQUIRE(svg.substr(svg.size() - 7) == "</svg>\n");
}

TEST_CASE("Unwritable paths raise IoError") {
    const RunResult run = circle_run();
    REQUIRE_THROWS_AS(emit_time_series(run.samples, "/nonexistent-dir/out.csv"), IoError);
    REQUIRE_THROWS_AS(emit_snapshot(run.samples.back(), "/nonexistent-dir/out.csv"), IoError);
    REQUIRE_THROWS_AS(emit_snapshot_svg(run.samples.back(), "/nonexistent-dir/out.svg"),
                      IoError);
}
