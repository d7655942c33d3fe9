#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "capflow/errors.hpp"
#include "capflow/flow.hpp"
#include "capflow/potential.hpp"
#include "capflow/radial.hpp"

namespace capflow {

/// Per-sample diagnostics CSV, one row per state, 12 significant digits.
/// dist_to_Ropt is the clearance between the curve and the stationary ball.
inline void emit_time_series(const std::vector<FlowState>& states, std::ostream& os) {
    const double r_opt = compute_r_opt();
    os << "t,min_rho,max_rho,area,length,min_condition,max_abs_unu,lipschitz_norm,dist_to_Ropt\n";
    char buf[360];
    for (const auto& s : states) {
        const auto& d = s.diagnostics;
        std::snprintf(buf, sizeof buf,
                      "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", s.t, d.min_rho,
                      d.max_rho, d.area, d.length, d.min_condition, d.max_abs_unu,
                      d.lipschitz_norm, d.min_rho - r_opt);
        os << buf;
    }
    if (!os) throw IoError("failed to write time series CSV");
}

/// Node-wise snapshot of one state: angle, radius, curvature, boundary flux.
inline void emit_snapshot(const FlowState& state, std::ostream& os) {
    const auto h = curvature(state.curve);
    if (h.size() != state.trace.u_nu.size())
        throw GridMismatchError("emit_snapshot: trace/curve node counts differ");
    os << "theta,rho,H,u_nu\n";
    char buf[180];
    for (int j = 0; j < state.curve.n_theta(); ++j) {
        const auto sj = static_cast<std::size_t>(j);
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g\n", state.curve.theta(j),
                      state.curve.rho(j), h[sj], state.trace.u_nu[sj]);
        os << buf;
    }
    if (!os) throw IoError("failed to write snapshot CSV");
}

/// Closed-polyline picture of the curve with the inner unit circle (solid)
/// and the stationary circle (dashed) for reference.
inline void emit_snapshot_svg(const FlowState& state, std::ostream& os) {
    const double r_opt = compute_r_opt();
    const double extent = 1.1 * state.curve.max_rho();
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\" "
                  "viewBox=\"%.6g %.6g %.6g %.6g\">\n",
                  -extent, -extent, 2.0 * extent, 2.0 * extent);
    os << buf;
    std::snprintf(buf, sizeof buf,
                  "  <circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"#999999\" "
                  "stroke-width=\"%.6g\"/>\n",
                  0.01 * extent);
    os << buf;
    std::snprintf(buf, sizeof buf,
                  "  <circle cx=\"0\" cy=\"0\" r=\"%.12g\" fill=\"none\" stroke=\"#cc3333\" "
                  "stroke-width=\"%.6g\" stroke-dasharray=\"%.6g %.6g\"/>\n",
                  r_opt, 0.01 * extent, 0.05 * extent, 0.03 * extent);
    os << buf;
    os << "  <polygon fill=\"none\" stroke=\"#1f6fb4\" points=\"";
    for (int j = 0; j < state.curve.n_theta(); ++j) {
        const double x = state.curve.rho(j) * std::cos(state.curve.theta(j));
        const double y = -state.curve.rho(j) * std::sin(state.curve.theta(j));  // y-down SVG frame
        std::snprintf(buf, sizeof buf, "%s%.8g,%.8g", j == 0 ? "" : " ", x, y);
        os << buf;
    }
    std::snprintf(buf, sizeof buf, "\" stroke-width=\"%.6g\"/>\n</svg>\n", 0.015 * extent);
    os << buf;
    if (!os) throw IoError("failed to write snapshot SVG");
}

namespace detail {

inline std::ofstream open_output(const std::string& path) {
    std::ofstream os(path);
    if (!os.is_open()) throw IoError("cannot open output file: " + path);
    return os;
}

}  // namespace detail

inline void emit_time_series(const std::vector<FlowState>& states, const std::string& path) {
    auto os = detail::open_output(path);
    emit_time_series(states, os);
}

inline void emit_snapshot(const FlowState& state, const std::string& path) {
    auto os = detail::open_output(path);
    emit_snapshot(state, os);
}

inline void emit_snapshot_svg(const FlowState& state, const std::string& path) {
    auto os = detail::open_output(path);
    emit_snapshot_svg(state, os);
}

}  // namespace capflow
