#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <future>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "capflow/errors.hpp"
#include "capflow/flow.hpp"
#include "capflow/polar_curve.hpp"
#include "capflow/radial.hpp"

namespace capflow {

// One entry per verified statement: the comparison principle, preservation of
// the shrinking condition, convexity preservation, the four quantitative
// bounds (containment, distance, flux, Lipschitz), and long-time convergence.
enum class TheoremId {
    T2_1_comparison,
    T3_1_preservation,
    C3_2_convexity,
    P4_1_containment,
    P4_2_distance,
    P4_3_lipschitz_potential,
    P4_4_lipschitz_curve,
    T1_1_convergence,
};

inline constexpr int kTheoremCount = 8;

inline const char* theorem_id_name(TheoremId id) {
    switch (id) {
        case TheoremId::T2_1_comparison: return "T2_1_comparison";
        case TheoremId::T3_1_preservation: return "T3_1_preservation";
        case TheoremId::C3_2_convexity: return "C3_2_convexity";
        case TheoremId::P4_1_containment: return "P4_1_containment";
        case TheoremId::P4_2_distance: return "P4_2_distance";
        case TheoremId::P4_3_lipschitz_potential: return "P4_3_lipschitz_potential";
        case TheoremId::P4_4_lipschitz_curve: return "P4_4_lipschitz_curve";
        case TheoremId::T1_1_convergence: return "T1_1_convergence";
    }
    return "unknown";
}

struct TheoremReport {
    TheoremId id = TheoremId::T2_1_comparison;
    bool passed = false;
    double measured = 0.0;   // worst-case margin observed over the run
    double tolerance = 0.0;  // pass threshold; predicate direction depends on the statement
    std::string run_metadata;
};

struct VerifyTolerances {
    double containment_slack_rel = 1e-6;  // times max sampled outer radius
    double condition_margin = 5e-3;
    double convergence_tol = 1e-2;
    double unu_bound_slack = 1e-2;
    double distance_slack = 1e-3;
};

// ---- evaluators over sampled trajectories ---------------------------------
// These consume RunResult::samples directly so the same measurements back
// both the verification ops below and standalone experiment drivers.

/// min over shared sample times and nodes of (rho_outer - rho_inner).
inline double comparison_margin(const std::vector<FlowState>& inner,
                                const std::vector<FlowState>& outer) {
    if (inner.empty() || outer.empty())
        throw ValidationError("comparison_margin: empty sample sequence");
    const std::size_t m = std::min(inner.size(), outer.size());
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
        const PolarCurve& a = inner[i].curve;
        const PolarCurve& b = outer[i].curve;
        if (a.n_theta() != b.n_theta())
            throw GridMismatchError("comparison_margin: node counts differ");
        for (int j = 0; j < a.n_theta(); ++j) worst = std::min(worst, b.rho(j) - a.rho(j));
    }
    return worst;
}

/// min over sampled t of min_j (H - u_nu^2).
inline double preservation_margin(const std::vector<FlowState>& samples) {
    if (samples.empty()) throw ValidationError("preservation_margin: empty sample sequence");
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& s : samples) worst = std::min(worst, s.diagnostics.min_condition);
    return worst;
}

/// min over sampled t of the minimum curvature.
inline double convexity_margin(const std::vector<FlowState>& samples) {
    if (samples.empty()) throw ValidationError("convexity_margin: empty sample sequence");
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& s : samples) worst = std::min(worst, s.diagnostics.min_curvature);
    return worst;
}

/// min over sampled t of (min rho) / ball_radius; > 1 means the ball stays
/// compactly contained for star-shaped curves.
inline double containment_lambda(const std::vector<FlowState>& samples, double ball_radius) {
    if (samples.empty()) throw ValidationError("containment_lambda: empty sample sequence");
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& s : samples) worst = std::min(worst, s.diagnostics.min_rho / ball_radius);
    return worst;
}

struct DistanceCheck {
    double min_distance = 0.0;     // min over t of dist(boundary, ball of radius r_opt)
    double barrier_deficit = 0.0;  // min over t of dist - (R_barrier - r_opt)
};

/// Distance persistence against the radial barrier: the circle of radius
/// min rho(0) flows radially and stays inside by comparison, so the distance
/// to the r_opt ball is bounded below by R_barrier(t) - r_opt.
inline DistanceCheck distance_check(const std::vector<FlowState>& samples, double r_opt,
                                    double barrier_dt) {
    if (samples.empty()) throw ValidationError("distance_check: empty sample sequence");
    DistanceCheck out;
    out.min_distance = std::numeric_limits<double>::infinity();
    out.barrier_deficit = std::numeric_limits<double>::infinity();
    double rb = samples.front().diagnostics.min_rho;
    double tb = samples.front().t;
    for (const auto& s : samples) {
        if (s.t > tb) {
            rb = integrate_radial(rb, s.t - tb, barrier_dt).back().R;
            tb = s.t;
        }
        const double dist = s.diagnostics.min_rho - r_opt;
        out.min_distance = std::min(out.min_distance, dist);
        out.barrier_deficit = std::min(out.barrier_deficit, dist - (rb - r_opt));
    }
    return out;
}

/// max over sampled t of max_j |u_nu|.
inline double max_flux_magnitude(const std::vector<FlowState>& samples) {
    if (samples.empty()) throw ValidationError("max_flux_magnitude: empty sample sequence");
    double worst = 0.0;
    for (const auto& s : samples) worst = std::max(worst, s.diagnostics.max_abs_unu);
    return worst;
}

/// max over sampled t of the polar Lipschitz seminorm max |rho_theta|.
inline double lipschitz_sup(const std::vector<FlowState>& samples) {
    if (samples.empty()) throw ValidationError("lipschitz_sup: empty sample sequence");
    double worst = 0.0;
    for (const auto& s : samples) worst = std::max(worst, s.diagnostics.lipschitz_norm);
    return worst;
}

/// Lipschitz cap from the tangent-cone construction: every boundary point
/// sees the ball of radius r_opt under half-angle theta_0/2 with
/// cos(theta_0/2) = r_opt / (r_opt + delta), and the graph stays below
/// 2 diam / theta_0. Requires positive clearance delta.
inline double lipschitz_cap(double diameter0, double delta, double r_opt) {
    if (!(delta > 0.0))
        throw ValidationError("lipschitz_cap: clearance delta must be positive");
    const double theta0 = 2.0 * std::acos(r_opt / (r_opt + delta));
    return 2.0 * diameter0 / theta0;
}

/// max_j |rho(theta_j) - r_opt| at the final sampled state.
inline double convergence_error(const std::vector<FlowState>& samples, double r_opt) {
    if (samples.empty()) throw ValidationError("convergence_error: empty sample sequence");
    const PolarCurve& c = samples.back().curve;
    double worst = 0.0;
    for (int j = 0; j < c.n_theta(); ++j) worst = std::max(worst, std::abs(c.rho(j) - r_opt));
    return worst;
}

// ---- verification operations ----------------------------------------------

namespace detail {

inline std::string run_metadata_string(const FlowConfig& config, const PolarCurve& initial) {
    char buf[128];
    std::snprintf(buf, sizeof buf, " init_min_rho=%.12g init_max_rho=%.12g",
                  initial.min_rho(), initial.max_rho());
    return describe(config) + buf;
}

inline RunResult run_completed(const PolarCurve& initial, const FlowConfig& config,
                               bool force) {
    RunResult r = run_flow(initial, config, force);
    if (!r.completed)
        throw NumericalError("verification run failed at t = " +
                             std::to_string(r.failure_time) + ": " + r.failure_message);
    return r;
}

}  // namespace detail

/// Comparison principle: nested initial curves stay nested. Both flows run
/// under the same config; initial data only needs containment, not the
/// shrinking condition, so the runs are forced.
inline TheoremReport verify_comparison(const PolarCurve& inner, const PolarCurve& outer,
                                       const FlowConfig& config,
                                       const VerifyTolerances& tols = {}) {
    if (!contains(outer, inner))
        throw ValidationError("verify_comparison: outer curve does not contain inner at t = 0");
    const RunResult run_in = detail::run_completed(inner, config, true);
    const RunResult run_out = detail::run_completed(outer, config, true);
    double scale = 0.0;
    for (const auto& s : run_out.samples) scale = std::max(scale, s.diagnostics.max_rho);
    TheoremReport rep;
    rep.id = TheoremId::T2_1_comparison;
    rep.measured = comparison_margin(run_in.samples, run_out.samples);
    rep.tolerance = tols.containment_slack_rel * scale;
    rep.passed = rep.measured > -rep.tolerance;
    rep.run_metadata = detail::run_metadata_string(config, outer);
    return rep;
}

/// Preservation of the strict shrinking condition along the flow.
inline TheoremReport verify_preservation(const PolarCurve& initial, const FlowConfig& config,
                                         const VerifyTolerances& tols = {}) {
    const RunResult run = detail::run_completed(initial, config, false);
    TheoremReport rep;
    rep.id = TheoremId::T3_1_preservation;
    rep.measured = preservation_margin(run.samples);
    rep.tolerance = tols.condition_margin;
    rep.passed = rep.measured > -rep.tolerance;
    rep.run_metadata = detail::run_metadata_string(config, initial);
    return rep;
}

/// Quantitative bounds along one admissible run: ball containment, distance
/// persistence against the radial barrier, the flux bound, and boundedness of
/// the polar Lipschitz seminorm. Returns the four reports in id order.
inline std::vector<TheoremReport> verify_bounds(const PolarCurve& initial,
                                                const FlowConfig& config,
                                                const VerifyTolerances& tols = {}) {
    const double r_opt = compute_r_opt();
    const RunResult run = detail::run_completed(initial, config, false);
    const std::string meta = detail::run_metadata_string(config, initial);
    std::vector<TheoremReport> out;

    TheoremReport containment;
    containment.id = TheoremId::P4_1_containment;
    containment.measured = containment_lambda(run.samples, r_opt);
    containment.tolerance = 1.0;
    containment.passed = containment.measured > containment.tolerance;
    containment.run_metadata = meta;
    out.push_back(containment);

    const DistanceCheck dc = distance_check(run.samples, r_opt, config.dt);
    TheoremReport distance;
    distance.id = TheoremId::P4_2_distance;
    distance.measured = dc.min_distance;
    distance.tolerance = tols.distance_slack;
    distance.passed = dc.min_distance > 0.0 && dc.barrier_deficit >= -tols.distance_slack;
    distance.run_metadata = meta;
    out.push_back(distance);

    TheoremReport flux;
    flux.id = TheoremId::P4_3_lipschitz_potential;
    flux.measured = max_flux_magnitude(run.samples);
    flux.tolerance = 1.0 / (r_opt - 1.0) + tols.unu_bound_slack;
    flux.passed = flux.measured <= flux.tolerance;
    flux.run_metadata = meta;
    out.push_back(flux);

    TheoremReport lip;
    lip.id = TheoremId::P4_4_lipschitz_curve;
    lip.measured = lipschitz_sup(run.samples);
    lip.run_metadata = meta;
    if (dc.min_distance > 0.0) {
        lip.tolerance = lipschitz_cap(diameter(initial), dc.min_distance, r_opt);
        lip.passed = lip.measured <= lip.tolerance;
    } else {
        lip.tolerance = 0.0;  // no clearance, the cap construction collapses
        lip.passed = false;
    }
    out.push_back(lip);
    return out;
}

/// Long-time convergence to the stationary circle at the final sampled time.
inline TheoremReport verify_convergence(const PolarCurve& initial, const FlowConfig& config,
                                        const VerifyTolerances& tols = {}) {
    const RunResult run = detail::run_completed(initial, config, false);
    TheoremReport rep;
    rep.id = TheoremId::T1_1_convergence;
    rep.measured = convergence_error(run.samples, compute_r_opt());
    rep.tolerance = tols.convergence_tol;
    rep.passed = rep.measured < rep.tolerance;
    rep.run_metadata = detail::run_metadata_string(config, initial);
    return rep;
}

/// Default suite: one admissible run from `initial` plus one enclosing-circle
/// run for the comparison principle. The two flows are independent, so the
/// outer run executes on its own thread; reports are merged in id order. The
/// convergence report reflects the configured horizon, so t_end should be
/// large (about 50) for it to be meaningful.
inline std::vector<TheoremReport> run_verification_suite(const PolarCurve& initial,
                                                         const FlowConfig& config,
                                                         const VerifyTolerances& tols = {}) {
    config.validate();
    const double r_opt = compute_r_opt();
    const PolarCurve outer = PolarCurve::circle(initial.n_theta(), initial.max_rho() + 0.2);

    auto outer_future = std::async(std::launch::async, [&] {
        return detail::run_completed(outer, config, true);
    });
    const RunResult main_run = detail::run_completed(initial, config, false);
    const RunResult outer_run = outer_future.get();

    const std::string meta = detail::run_metadata_string(config, initial);
    std::vector<TheoremReport> reports;
    reports.reserve(kTheoremCount);

    TheoremReport cmp;
    cmp.id = TheoremId::T2_1_comparison;
    double scale = 0.0;
    for (const auto& s : outer_run.samples) scale = std::max(scale, s.diagnostics.max_rho);
    cmp.measured = comparison_margin(main_run.samples, outer_run.samples);
    cmp.tolerance = tols.containment_slack_rel * scale;
    cmp.passed = cmp.measured > -cmp.tolerance;
    cmp.run_metadata = meta;
    reports.push_back(cmp);

    TheoremReport pres;
    pres.id = TheoremId::T3_1_preservation;
    pres.measured = preservation_margin(main_run.samples);
    pres.tolerance = tols.condition_margin;
    pres.passed = pres.measured > -pres.tolerance;
    pres.run_metadata = meta;
    reports.push_back(pres);

    TheoremReport conv;
    conv.id = TheoremId::C3_2_convexity;
    conv.measured = convexity_margin(main_run.samples);
    conv.tolerance = 0.0;
    conv.passed = conv.measured > 0.0;
    conv.run_metadata = meta;
    reports.push_back(conv);

    TheoremReport containment;
    containment.id = TheoremId::P4_1_containment;
    containment.measured = containment_lambda(main_run.samples, r_opt);
    containment.tolerance = 1.0;
    containment.passed = containment.measured > containment.tolerance;
    containment.run_metadata = meta;
    reports.push_back(containment);

    const DistanceCheck dc = distance_check(main_run.samples, r_opt, config.dt);
    TheoremReport distance;
    distance.id = TheoremId::P4_2_distance;
    distance.measured = dc.min_distance;
    distance.tolerance = tols.distance_slack;
    distance.passed = dc.min_distance > 0.0 && dc.barrier_deficit >= -tols.distance_slack;
    distance.run_metadata = meta;
    reports.push_back(distance);

    TheoremReport flux;
    flux.id = TheoremId::P4_3_lipschitz_potential;
    flux.measured = max_flux_magnitude(main_run.samples);
    flux.tolerance = 1.0 / (r_opt - 1.0) + tols.unu_bound_slack;
    flux.passed = flux.measured <= flux.tolerance;
    flux.run_metadata = meta;
    reports.push_back(flux);

    TheoremReport lip;
    lip.id = TheoremId::P4_4_lipschitz_curve;
    lip.measured = lipschitz_sup(main_run.samples);
    lip.run_metadata = meta;
    if (dc.min_distance > 0.0) {
        lip.tolerance = lipschitz_cap(diameter(initial), dc.min_distance, r_opt);
        lip.passed = lip.measured <= lip.tolerance;
    } else {
        lip.tolerance = 0.0;
        lip.passed = false;
    }
    reports.push_back(lip);

    TheoremReport tail;
    tail.id = TheoremId::T1_1_convergence;
    tail.measured = convergence_error(main_run.samples, r_opt);
    tail.tolerance = tols.convergence_tol;
    tail.passed = tail.measured < tail.tolerance;
    tail.run_metadata = meta;
    reports.push_back(tail);

    return reports;
}

// ---- report serialization --------------------------------------------------

inline std::uint64_t fnv1a_hash(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline bool all_passed(const std::vector<TheoremReport>& reports) {
    return std::all_of(reports.begin(), reports.end(),
                       [](const TheoremReport& r) { return r.passed; });
}

inline void write_report_text(const std::vector<TheoremReport>& reports, std::ostream& os) {
    for (const auto& r : reports) {
        char buf[192];
        std::snprintf(buf, sizeof buf, "%-26s %s  measured=%.12g  tolerance=%.12g  config=%016llx\n",
                      theorem_id_name(r.id), r.passed ? "PASS" : "FAIL", r.measured,
                      r.tolerance,
                      static_cast<unsigned long long>(fnv1a_hash(r.run_metadata)));
        os << buf;
    }
    if (!os) throw IoError("failed to write report text");
}

inline void write_report_csv(const std::vector<TheoremReport>& reports, std::ostream& os) {
    os << "theorem,passed,measured,tolerance,config_hash\n";
    for (const auto& r : reports) {
        char buf[192];
        std::snprintf(buf, sizeof buf, "%s,%d,%.12g,%.12g,%016llx\n", theorem_id_name(r.id),
                      r.passed ? 1 : 0, r.measured, r.tolerance,
                      static_cast<unsigned long long>(fnv1a_hash(r.run_metadata)));
        os << buf;
    }
    if (!os) throw IoError("failed to write report CSV");
}

}  // namespace capflow
