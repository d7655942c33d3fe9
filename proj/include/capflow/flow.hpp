#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "capflow/cyclic_tridiagonal.hpp"
#include "capflow/errors.hpp"
#include "capflow/polar_curve.hpp"
#include "capflow/potential.hpp"

namespace capflow {

enum class TimeScheme { imex, explicit_euler };

struct FlowConfig {
    int n_theta = 256;
    int m_s = 128;
    double dt = 1e-3;
    double t_end = 5.0;
    TimeScheme scheme = TimeScheme::imex;
    double solver_tol = 1e-10;
    int output_every = 100;
    double condition_margin = 5e-3;  // warn below -margin, keep running
    int solve_every = 1;             // potential refresh cadence; 1 = every step
    double gap_epsilon = 1e-3;

    bool operator==(const FlowConfig&) const = default;

    void validate() const {
        if (n_theta < 16 || n_theta % 2 != 0)
            throw ValidationError("flow config: n_theta must be even and >= 16");
        if (m_s < 8) throw ValidationError("flow config: m_s must be >= 8");
        if (!(dt > 0.0)) throw ValidationError("flow config: dt must be positive");
        if (t_end < 0.0) throw ValidationError("flow config: t_end must be >= 0");
        if (!(solver_tol > 0.0)) throw ValidationError("flow config: solver_tol must be positive");
        if (output_every < 1) throw ValidationError("flow config: output_every must be >= 1");
        if (!(condition_margin > 0.0))
            throw ValidationError("flow config: condition_margin must be positive");
        if (solve_every < 1) throw ValidationError("flow config: solve_every must be >= 1");
        if (!(gap_epsilon > 0.0))
            throw ValidationError("flow config: gap_epsilon must be positive");
    }
};

inline std::string describe(const FlowConfig& c) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "n_theta=%d m_s=%d dt=%.17g t_end=%.17g scheme=%s solver_tol=%.17g "
                  "output_every=%d condition_margin=%.17g solve_every=%d gap_epsilon=%.17g",
                  c.n_theta, c.m_s, c.dt, c.t_end,
                  c.scheme == TimeScheme::imex ? "imex" : "explicit", c.solver_tol,
                  c.output_every, c.condition_margin, c.solve_every, c.gap_epsilon);
    return buf;
}

/// One instant of the coupled flow. Diagnostics are recomputed from the
/// stored curve and trace whenever a state is produced, never carried stale.
struct FlowState {
    double t = 0.0;
    PolarCurve curve;
    BoundaryTrace trace;
    CurveDiagnostics diagnostics;
};

struct ConditionWarning {
    double t = 0.0;
    double min_condition = 0.0;
};

/// min_j (H - u_nu^2): positive means the domain is strictly shrinking.
inline double check_condition(const PolarCurve& curve, const BoundaryTrace& trace) {
    if (static_cast<int>(trace.u_nu_sq.size()) != curve.n_theta())
        throw GridMismatchError("check_condition: trace/curve node counts differ");
    const auto h = curvature(curve);
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < h.size(); ++j) m = std::min(m, h[j] - trace.u_nu_sq[j]);
    return m;
}

inline double check_condition(const FlowState& state) {
    return check_condition(state.curve, state.trace);
}

inline CurveDiagnostics compute_diagnostics(const PolarCurve& curve,
                                            const BoundaryTrace& trace) {
    const auto al = area_length(curve);
    const auto h = curvature(curve);
    CurveDiagnostics d;
    d.area = al.area;
    d.length = al.length;
    d.min_rho = curve.min_rho();
    d.max_rho = curve.max_rho();
    d.lipschitz_norm = lipschitz_norm(curve);
    d.min_curvature = *std::min_element(h.begin(), h.end());
    d.min_condition = check_condition(curve, trace);
    d.max_abs_unu = 0.0;
    for (double v : trace.u_nu) d.max_abs_unu = std::max(d.max_abs_unu, std::abs(v));
    return d;
}

/// Time derivative of rho under the flow law V = H - u_nu^2, projected to the
/// polar parametrization: moving the boundary with inward normal speed V means
///   d_t rho = -(H - u_nu^2) * sqrt(rho^2 + rho_t^2) / rho.
inline std::vector<double> evolution_rhs(const PolarCurve& curve, const BoundaryTrace& trace) {
    const int n = curve.n_theta();
    if (static_cast<int>(trace.u_nu_sq.size()) != n)
        throw GridMismatchError("evolution_rhs: trace/curve node counts differ");
    const auto d = curve_derivatives(curve);
    std::vector<double> rhs(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        const double r = curve.rho(j);
        const double rt = d.rho_theta[sj];
        const double rtt = d.rho_thetatheta[sj];
        const double g2 = r * r + rt * rt;
        // Expanded form: the curvature splits into a diffusive rho_tt term
        // and a lower-order part.
        rhs[sj] = rtt / g2 - (r * r + 2.0 * rt * rt) / (r * g2) +
                  trace.u_nu_sq[sj] * std::sqrt(g2) / r;
    }
    return rhs;
}

/// Advances the coupled system: per step, evolve rho with the current
/// (lagged) trace, then re-solve the potential on the new curve to refresh
/// the trace. The imex scheme treats the diffusive rho_tt term implicitly at
/// frozen coefficients D = 1/(rho^2 + rho_t^2):
///   (I - dt D Lap_theta) rho^{n+1} = rho^n + dt F^n,
/// with everything else (including u_nu^2) collected explicitly in F^n.
/// Uniform parabolicity keeps D bounded above and below along admissible
/// flows, which is what makes the frozen-coefficient split stable.
class FlowStepper {
public:
    explicit FlowStepper(FlowConfig config)
        : cfg_(config), solver_(make_solver_options(config)) {
        cfg_.validate();
    }

    /// Solve the potential on the initial curve and package t = 0.
    FlowState init(const PolarCurve& initial) {
        if (initial.n_theta() != cfg_.n_theta)
            throw GridMismatchError("initial curve has " + std::to_string(initial.n_theta()) +
                                    " nodes, config expects " + std::to_string(cfg_.n_theta));
        steps_taken_ = 0;
        solver_.reset();
        const PotentialField field = solver_.solve(initial, cfg_.m_s);
        BoundaryTrace trace = normal_derivative(field, initial);
        CurveDiagnostics diag = compute_diagnostics(initial, trace);
        return FlowState{0.0, initial, std::move(trace), diag};
    }

    FlowState step(const FlowState& state) { return step(state, cfg_.dt); }

    /// One step of size h (h = dt except for a shortened final step).
    FlowState step(const FlowState& state, double h) {
        const int n = cfg_.n_theta;
        const double dth = state.curve.dtheta();
        std::vector<double> next_rho;

        if (cfg_.scheme == TimeScheme::explicit_euler) {
            const double cap = 0.4 * dth * dth * state.curve.min_rho() * state.curve.min_rho();
            if (h > cap)
                throw NumericalError("explicit scheme unstable: dt = " + std::to_string(h) +
                                     " exceeds 0.4 dtheta^2 min_rho^2 = " + std::to_string(cap));
            const auto rhs = evolution_rhs(state.curve, state.trace);
            next_rho.resize(static_cast<std::size_t>(n));
            for (int j = 0; j < n; ++j)
                next_rho[static_cast<std::size_t>(j)] =
                    state.curve.rho(j) + h * rhs[static_cast<std::size_t>(j)];
        } else {
            const auto d = curve_derivatives(state.curve);
            const double alpha = h / (dth * dth);
            std::vector<double> sub(static_cast<std::size_t>(n)), dia(static_cast<std::size_t>(n)),
                sup(static_cast<std::size_t>(n)), rhs(static_cast<std::size_t>(n));
            for (int j = 0; j < n; ++j) {
                const auto sj = static_cast<std::size_t>(j);
                const double r = state.curve.rho(j);
                const double rt = d.rho_theta[sj];
                const double g2 = r * r + rt * rt;
                const double D = 1.0 / g2;
                const double F = -(r * r + 2.0 * rt * rt) / (r * g2) +
                                 state.trace.u_nu_sq[sj] * std::sqrt(g2) / r;
                sub[sj] = -alpha * D;
                sup[sj] = -alpha * D;
                dia[sj] = 1.0 + 2.0 * alpha * D;
                rhs[sj] = r + h * F;
            }
            next_rho = solve_cyclic_tridiagonal(sub, dia, sup, rhs);
        }

        double min_r = std::numeric_limits<double>::infinity();
        for (double v : next_rho) {
            if (!std::isfinite(v))
                throw NumericalError("flow update produced a non-finite radius at t = " +
                                     std::to_string(state.t + h));
            min_r = std::min(min_r, v);
        }
        if (min_r <= 1.0 + cfg_.gap_epsilon)
            throw GeometryError("flow reached the inner obstacle at t = " +
                                std::to_string(state.t + h) +
                                " (min rho = " + std::to_string(min_r) + ")");

        PolarCurve curve(std::move(next_rho));
        ++steps_taken_;

        BoundaryTrace trace;
        if (steps_taken_ % cfg_.solve_every == 0) {
            const PotentialField field = solver_.solve(curve, cfg_.m_s);
            trace = normal_derivative(field, curve);
        } else {
            trace = state.trace;  // reuse the lagged trace between refreshes
        }

        CurveDiagnostics diag = compute_diagnostics(curve, trace);
        FlowState next{state.t + h, std::move(curve), std::move(trace), diag};
        if (diag.min_condition < -cfg_.condition_margin)
            warnings_.push_back({next.t, diag.min_condition});
        return next;
    }

    const std::vector<ConditionWarning>& warnings() const { return warnings_; }
    const SolveStats& last_solve_stats() const { return solver_.last_stats(); }

private:
    static SolverOptions make_solver_options(const FlowConfig& c) {
        SolverOptions o;
        o.tol = c.solver_tol;
        o.gap_epsilon = c.gap_epsilon;
        return o;
    }

    FlowConfig cfg_;
    PotentialSolver solver_;
    long steps_taken_ = 0;
    std::vector<ConditionWarning> warnings_;
};

/// Full trajectory of a run: states sampled every output_every steps (always
/// including t = 0 and the final time), warnings, and how the run ended.
struct RunResult {
    std::vector<FlowState> samples;
    std::vector<ConditionWarning> warnings;
    bool completed = false;
    double failure_time = 0.0;
    std::string failure_message;
};

/// Run the flow from `initial` to t_end. Refuses initial data violating the
/// strict shrinking condition min(H - u_nu^2) > 0 unless `force` is set
/// (forced runs exist to probe what happens without it). A mid-run fatal
/// error ends the trajectory early and is reported in the result rather than
/// thrown.
inline RunResult run_flow(const PolarCurve& initial, const FlowConfig& config,
                          bool force = false) {
    config.validate();
    FlowStepper stepper(config);
    FlowState state = stepper.init(initial);
    if (!force && !(state.diagnostics.min_condition > 0.0))
        throw ValidationError(
            "initial data violates the shrinking condition: min(H - u_nu^2) = " +
            std::to_string(state.diagnostics.min_condition) +
            " <= 0 (pass force to run anyway)");

    const long n_full = static_cast<long>(std::floor(config.t_end / config.dt + 1e-9));
    const double remainder = config.t_end - n_full * config.dt;
    const long n_steps = n_full + (remainder > 1e-12 * config.dt ? 1 : 0);

    RunResult result;
    result.samples.push_back(state);
    for (long i = 0; i < n_steps; ++i) {
        const double h = (i < n_full) ? config.dt : remainder;
        try {
            state = stepper.step(state, h);
        } catch (const Error& e) {
            result.warnings = stepper.warnings();
            result.completed = false;
            result.failure_time = state.t;
            result.failure_message = e.what();
            return result;
        }
        if ((i + 1) % config.output_every == 0 || i + 1 == n_steps)
            result.samples.push_back(state);
    }
    result.warnings = stepper.warnings();
    result.completed = true;
    return result;
}

}  // namespace capflow
