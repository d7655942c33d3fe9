#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "capflow/errors.hpp"

namespace capflow {

/// Radially symmetric flows: a ball B_R evolves by the scalar ODE
/// dR/dt = f(R) with f below. These are exact solutions, used both as
/// analytic oracles for the elliptic solver and as inner/outer barriers for
/// comparison arguments. The only singularity of f is at R = 1.

/// f(R) = -1/R + 1/(R^2 log^2 R): curvature 1/R against squared boundary
/// flux 1/(R log R)^2 of the annulus potential.
inline double radial_velocity(double R) {
    if (!(R > 1.0))
        throw ValidationError("radial velocity is defined for R > 1 only, got R = " +
                              std::to_string(R));
    const double lr = std::log(R);
    return -1.0 / R + 1.0 / (R * R * lr * lr);
}

/// Capacity potential of the annulus B_R \ B_1 at radius r:
///   u_R(r) = -(log r - log R) / log R,  clamped to [boundary data] outside.
inline double radial_potential(double r, double R) {
    if (!(R > 1.0)) throw ValidationError("radial potential requires R > 1");
    if (r <= 1.0) return 1.0;
    if (r >= R) return 0.0;
    return -(std::log(r) - std::log(R)) / std::log(R);
}

/// Outward normal derivative of u_R on the outer boundary: -1/(R log R).
inline double radial_flux(double R) {
    if (!(R > 1.0)) throw ValidationError("radial flux requires R > 1");
    return -1.0 / (R * std::log(R));
}

/// The unique stationary radius, (log R)^2 = 1/R, via bisection of
/// g(R) = R log^2 R - 1 on [1.5, 3] where g is strictly increasing
/// (g(1.5) < 0 < g(3)). The returned midpoint is within tol of the root.
inline double compute_r_opt(double tol = 1e-12) {
    if (!(tol > 0.0) || tol >= 1e-3)
        throw ValidationError("compute_r_opt: tol must lie in (0, 1e-3)");
    auto g = [](double R) {
        const double lr = std::log(R);
        return R * lr * lr - 1.0;
    };
    double lo = 1.5, hi = 3.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct RadialState {
    double R = 0.0;  // > 1
    double t = 0.0;
};

/// Classical 4th-order one-step integration of dR/dt = f(R) with fixed dt;
/// a shorter final step lands exactly on t_end when it is not a multiple of
/// dt. Returns states at t = 0, dt, 2dt, ..., t_end.
inline std::vector<RadialState> integrate_radial(double R0, double t_end, double dt) {
    if (!(R0 > 1.0)) throw ValidationError("integrate_radial requires R0 > 1");
    if (!(dt > 0.0)) throw ValidationError("integrate_radial requires dt > 0");
    if (t_end < 0.0) throw ValidationError("integrate_radial requires t_end >= 0");

    auto f_guarded = [](double R) {
        if (R <= 1.0 + 1e-12)
            throw NumericalError("radial trajectory reached the singular radius R = 1");
        return radial_velocity(R);
    };

    std::vector<RadialState> out;
    out.push_back({R0, 0.0});
    double R = R0, t = 0.0;
    const long n_full = static_cast<long>(std::floor(t_end / dt + 1e-9));
    const double remainder = t_end - n_full * dt;
    const long n_steps = n_full + (remainder > 1e-12 * dt ? 1 : 0);
    for (long i = 0; i < n_steps; ++i) {
        const double h = (i < n_full) ? dt : remainder;
        const double k1 = f_guarded(R);
        const double k2 = f_guarded(R + 0.5 * h * k1);
        const double k3 = f_guarded(R + 0.5 * h * k2);
        const double k4 = f_guarded(R + h * k3);
        R += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!(R > 1.0) || !std::isfinite(R))
            throw NumericalError("radial trajectory left the domain R > 1 at t = " +
                                 std::to_string(t + h));
        t = (i < n_full) ? (i + 1) * dt : t_end;
        out.push_back({R, t});
    }
    return out;
}

}  // namespace capflow
