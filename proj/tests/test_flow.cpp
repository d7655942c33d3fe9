#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "capflow/flow.hpp"
#include "capflow/radial.hpp"

using namespace capflow;
using Catch::Matchers::WithinAbs;

namespace {

FlowConfig small_config(double t_end, double dt = 1e-3, int output_every = 100) {
    FlowConfig c;
    c.n_theta = 64;
    c.m_s = 32;
    c.dt = dt;
    c.t_end = t_end;
    c.output_every = output_every;
    return c;
}

BoundaryTrace exact_circle_trace(int n, double R) {
    BoundaryTrace t;
    t.u_nu.assign(static_cast<std::size_t>(n), radial_flux(R));
    t.u_nu_sq.assign(static_cast<std::size_t>(n), radial_flux(R) * radial_flux(R));
    return t;
}

}  // namespace

TEST_CASE("Configuration validation") {
    FlowConfig c = small_config(1.0);
    REQUIRE_NOTHROW(c.validate());
    c.n_theta = 15;
    REQUIRE_THROWS_AS(c.validate(), ValidationError);
    c = small_config(1.0);
    c.dt = 0.0;
    REQUIRE_THROWS_AS(c.validate(), ValidationError);
    c = small_config(1.0);
    c.output_every = 0;
    REQUIRE_THROWS_AS(c.validate(), ValidationError);
    c = small_config(1.0);
    c.solve_every = 0;
    REQUIRE_THROWS_AS(c.validate(), ValidationError);

    const std::string d = describe(small_config(2.5));
    REQUIRE(d.find("n_theta=64") != std::string::npos);
    REQUIRE(d.find("t_end=2.5") != std::string::npos);
    REQUIRE(d.find("scheme=imex") != std::string::npos);
}

TEST_CASE("Evolution right-hand side reduces to the radial law on circles") {
    for (double R : {2.0, 3.0, compute_r_opt()}) {
        const PolarCurve c = PolarCurve::circle(64, R);
        const auto rhs = evolution_rhs(c, exact_circle_trace(64, R));
        for (double v : rhs) REQUIRE_THAT(v, WithinAbs(radial_velocity(R), 1e-12));
    }
    // Mismatched trace length is rejected.
    REQUIRE_THROWS_AS(evolution_rhs(PolarCurve::circle(64, 2.0), exact_circle_trace(32, 2.0)),
                      GridMismatchError);
}

TEST_CASE("Condition value matches the radial formulas") {
    const PolarCurve c3 = PolarCurve::circle(64, 3.0);
    REQUIRE_THAT(check_condition(c3, exact_circle_trace(64, 3.0)),
                 WithinAbs(1.0 / 3.0 - 1.0 / (9.0 * std::log(3.0) * std::log(3.0)), 1e-14));
    const PolarCurve c2 = PolarCurve::circle(64, 2.0);
    REQUIRE(check_condition(c2, exact_circle_trace(64, 2.0)) < 0.0);  // violates the condition
}

TEST_CASE("A single imex step from a circle tracks the radial derivative") {
    FlowStepper stepper(small_config(1.0));
    const FlowState s0 = stepper.init(PolarCurve::circle(64, 3.0));
    REQUIRE(s0.t == 0.0);
    REQUIRE_THAT(s0.diagnostics.min_condition,
                 WithinAbs(1.0 / 3.0 - 1.0 / (9.0 * std::log(3.0) * std::log(3.0)), 1e-3));

    const FlowState s1 = stepper.step(s0);
    REQUIRE_THAT(s1.t, WithinAbs(1e-3, 1e-15));
    const double predict = 3.0 + 1e-3 * radial_velocity(3.0);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int j = 0; j < 64; ++j) {
        lo = std::min(lo, s1.curve.rho(j));
        hi = std::max(hi, s1.curve.rho(j));
    }
    REQUIRE_THAT(lo, WithinAbs(predict, 2e-7));  // limited by the trace error
    REQUIRE(hi - lo < 1e-12);                    // circles stay circles
}

TEST_CASE("Explicit scheme matches forward Euler and enforces its CFL bound") {
    FlowConfig c = small_config(1.0);
    c.scheme = TimeScheme::explicit_euler;
    c.dt = 1e-4;
    FlowStepper stepper(c);
    const FlowState s0 = stepper.init(PolarCurve::circle(64, 3.0));
    const auto rhs = evolution_rhs(s0.curve, s0.trace);
    const FlowState s1 = stepper.step(s0);
    for (int j = 0; j < 64; ++j)
        REQUIRE_THAT(s1.curve.rho(j),
                     WithinAbs(3.0 + 1e-4 * rhs[static_cast<std::size_t>(j)], 1e-15));

    // dt above 0.4 dtheta^2 min_rho^2 is refused.
    FlowConfig bad = small_config(1.0);
    bad.scheme = TimeScheme::explicit_euler;
    bad.dt = 0.1;
    FlowStepper unstable(bad);
    const FlowState u0 = unstable.init(PolarCurve::circle(64, 3.0));
    REQUIRE_THROWS_AS(unstable.step(u0), NumericalError);
}

TEST_CASE("Run refuses initial data violating the shrinking condition") {
    const PolarCurve c2 = PolarCurve::circle(64, 2.0);
    REQUIRE_THROWS_AS(run_flow(c2, small_config(0.1)), ValidationError);

    // Forced, the same circle expands toward the stationary radius and logs
    // a condition warning every step.
    const RunResult r = run_flow(c2, small_config(0.5), true);
    REQUIRE(r.completed);
    REQUIRE(r.samples.back().diagnostics.min_rho > 2.005);
    REQUIRE(r.warnings.size() == 500);
    REQUIRE_THAT(r.warnings.front().min_condition, WithinAbs(-0.0203, 1e-3));
}

TEST_CASE("Near-stationary circle stays put") {
    // The discrete equilibrium at (64, 32) sits about 3e-5 above R_opt, so a
    // circle at exactly R_opt is (correctly) refused; start just above.
    const double r_opt = compute_r_opt();
    const RunResult r =
        run_flow(PolarCurve::circle(64, r_opt + 1e-4), small_config(0.2), false);
    REQUIRE(r.completed);
    REQUIRE(r.warnings.empty());
    for (const auto& s : r.samples)
        for (int j = 0; j < 64; ++j)
            REQUIRE_THAT(s.curve.rho(j), WithinAbs(r_opt, 5e-4));
}

TEST_CASE("Admissible wavy runs shrink monotonically inside the radial sandwich") {
    const PolarCurve c = PolarCurve::fourier(64, 2.8, {{2, 0.15, 0.0}});
    FlowConfig cfg = small_config(0.5, 1e-3, 50);
    const RunResult r = run_flow(c, cfg, false);
    REQUIRE(r.completed);
    REQUIRE(r.warnings.empty());

    for (std::size_t i = 1; i < r.samples.size(); ++i)
        for (int j = 0; j < 64; ++j)
            REQUIRE(r.samples[i].curve.rho(j) <= r.samples[i - 1].curve.rho(j) + 1e-9);

    // Circles through min rho(0) and max rho(0) evolved radially bracket the
    // curve at every sampled time.
    double rin = 2.65, rout = 2.95, tprev = 0.0;
    for (const auto& s : r.samples) {
        if (s.t > tprev) {
            rin = integrate_radial(rin, s.t - tprev, 1e-3).back().R;
            rout = integrate_radial(rout, s.t - tprev, 1e-3).back().R;
            tprev = s.t;
        }
        REQUIRE(s.diagnostics.min_rho >= rin - 1e-6);
        REQUIRE(s.diagnostics.max_rho <= rout + 1e-6);
    }
}

TEST_CASE("Trajectories are rotation equivariant") {
    const int n = 64, shift = 11;
    const PolarCurve c = PolarCurve::fourier(n, 2.8, {{2, 0.15, 0.0}});
    std::vector<double> rot(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) rot[static_cast<std::size_t>(j)] = c.rho(j + shift);

    FlowStepper sa(small_config(1.0)), sb(small_config(1.0));
    FlowState a = sa.init(c);
    FlowState b = sb.init(PolarCurve{std::move(rot)});
    for (int k = 0; k < 5; ++k) {
        a = sa.step(a);
        b = sb.step(b);
    }
    for (int j = 0; j < n; ++j)
        REQUIRE_THAT(b.curve.rho(j), WithinAbs(a.curve.rho(j + shift), 1e-10));
}

TEST_CASE("Sampling includes t = 0, the cadence, and a partial final step") {
    FlowConfig cfg = small_config(0.0105, 1e-3, 3);
    const RunResult r = run_flow(PolarCurve::circle(64, 3.0), cfg, false);
    REQUIRE(r.completed);
    REQUIRE(r.samples.size() == 5);
    REQUIRE(r.samples[0].t == 0.0);
    REQUIRE_THAT(r.samples[1].t, WithinAbs(0.003, 1e-12));
    REQUIRE_THAT(r.samples[3].t, WithinAbs(0.009, 1e-12));
    REQUIRE_THAT(r.samples[4].t, WithinAbs(0.0105, 1e-12));
}

TEST_CASE("Reduced potential refresh cadence stays close to per-step solves") {
    FlowConfig every = small_config(0.1);
    FlowConfig lagged = every;
    lagged.solve_every = 2;
    const RunResult r1 = run_flow(PolarCurve::circle(64, 3.0), every, false);
    const RunResult r2 = run_flow(PolarCurve::circle(64, 3.0), lagged, false);
    REQUIRE_THAT(r2.samples.back().curve.rho(0),
                 WithinAbs(r1.samples.back().curve.rho(0), 1e-4));
}

TEST_CASE("Initial curves hugging the obstacle are rejected by the gap guard") {
    REQUIRE_THROWS_AS(run_flow(PolarCurve::circle(64, 1.0005), small_config(0.1), true),
                      GeometryError);
}

TEST_CASE("Stepper rejects a curve on the wrong grid") {
    FlowStepper stepper(small_config(1.0));
    REQUIRE_THROWS_AS(stepper.init(PolarCurve::circle(32, 3.0)), GridMismatchError);
}
