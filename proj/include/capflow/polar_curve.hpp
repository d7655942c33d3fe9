#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "capflow/errors.hpp"

namespace capflow {

/// A closed planar curve star-shaped about the origin, stored as radial
/// samples rho(theta_j) on the uniform periodic grid theta_j = 2*pi*j/n.
/// All lengths are in units of the inner-disk radius, so every valid curve
/// strictly encloses the unit circle: rho[j] > 1.
class PolarCurve {
public:
    struct FourierMode {
        int k = 1;
        double amplitude = 0.0;
        double phase = 0.0;
        bool operator==(const FourierMode&) const = default;
    };

    explicit PolarCurve(std::vector<double> radii) : rho_(std::move(radii)) {
        const int n = static_cast<int>(rho_.size());
        if (n < 16)
            throw ValidationError("PolarCurve requires at least 16 angular nodes, got " +
                                  std::to_string(n));
        if (n % 2 != 0)
            throw ValidationError("PolarCurve requires an even node count, got " +
                                  std::to_string(n));
        for (int j = 0; j < n; ++j) {
            if (!std::isfinite(rho_[j]))
                throw ValidationError("PolarCurve sample " + std::to_string(j) +
                                      " is not finite");
            if (rho_[j] <= 1.0)
                throw ValidationError("PolarCurve must strictly enclose the unit disk: rho[" +
                                      std::to_string(j) + "] = " + std::to_string(rho_[j]) +
                                      " <= 1");
        }
    }

    static PolarCurve circle(int n_theta, double radius) {
        return PolarCurve(std::vector<double>(static_cast<std::size_t>(n_theta), radius));
    }

    /// rho(theta) = base + sum_k amplitude_k * cos(k*theta + phase_k).
    static PolarCurve fourier(int n_theta, double base, const std::vector<FourierMode>& modes) {
        for (const auto& m : modes)
            if (m.k < 1)
                throw ValidationError("Fourier mode index must be >= 1, got " +
                                      std::to_string(m.k));
        std::vector<double> r(static_cast<std::size_t>(std::max(n_theta, 0)));
        const double dth = 2.0 * std::numbers::pi / n_theta;
        for (int j = 0; j < n_theta; ++j) {
            double v = base;
            for (const auto& m : modes) v += m.amplitude * std::cos(m.k * j * dth + m.phase);
            r[static_cast<std::size_t>(j)] = v;
        }
        return PolarCurve(std::move(r));
    }

    int n_theta() const { return static_cast<int>(rho_.size()); }
    double dtheta() const { return 2.0 * std::numbers::pi / n_theta(); }
    double theta(int j) const { return dtheta() * j; }

    /// Periodic access: any integer index is valid.
    double rho(int j) const { return rho_[static_cast<std::size_t>(wrap(j))]; }
    const std::vector<double>& samples() const { return rho_; }

    double min_rho() const { return *std::min_element(rho_.begin(), rho_.end()); }
    double max_rho() const { return *std::max_element(rho_.begin(), rho_.end()); }

    int wrap(int j) const {
        const int n = n_theta();
        j %= n;
        return j < 0 ? j + n : j;
    }

private:
    std::vector<double> rho_;
};

/// Per-node periodic central differences, 2nd order:
///   rho_theta[j]      = (rho[j+1] - rho[j-1]) / (2 dtheta)
///   rho_thetatheta[j] = (rho[j+1] - 2 rho[j] + rho[j-1]) / dtheta^2
struct CurveDerivatives {
    std::vector<double> rho_theta;
    std::vector<double> rho_thetatheta;
};

inline CurveDerivatives curve_derivatives(const PolarCurve& curve) {
    const int n = curve.n_theta();
    const double dth = curve.dtheta();
    CurveDerivatives d;
    d.rho_theta.resize(static_cast<std::size_t>(n));
    d.rho_thetatheta.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double rp = curve.rho(j + 1), rm = curve.rho(j - 1), r0 = curve.rho(j);
        d.rho_theta[static_cast<std::size_t>(j)] = (rp - rm) / (2.0 * dth);
        d.rho_thetatheta[static_cast<std::size_t>(j)] = (rp - 2.0 * r0 + rm) / (dth * dth);
    }
    return d;
}

/// Curvature of the polar graph r = rho(theta):
///   H = (rho^2 + 2 rho_theta^2 - rho rho_thetatheta) / (rho^2 + rho_theta^2)^{3/2},
/// positive for convex curves with the outward normal pointing away from the
/// origin. A circle of radius R gives H = 1/R at every node.
inline std::vector<double> curvature(const PolarCurve& curve) {
    const auto d = curve_derivatives(curve);
    const int n = curve.n_theta();
    std::vector<double> h(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double r = curve.rho(j);
        const double rt = d.rho_theta[static_cast<std::size_t>(j)];
        const double rtt = d.rho_thetatheta[static_cast<std::size_t>(j)];
        const double g2 = r * r + rt * rt;
        h[static_cast<std::size_t>(j)] = (r * r + 2.0 * rt * rt - r * rtt) / (g2 * std::sqrt(g2));
    }
    return h;
}

/// Outward unit normal and metric factor g = sqrt(rho^2 + rho_theta^2) per
/// node. The normal is nu = (rho e_r - rho_theta e_theta) / g.
struct NormalMetric {
    std::vector<std::array<double, 2>> normal;
    std::vector<double> metric;
};

inline NormalMetric normals_and_metric(const PolarCurve& curve) {
    const auto d = curve_derivatives(curve);
    const int n = curve.n_theta();
    NormalMetric nm;
    nm.normal.resize(static_cast<std::size_t>(n));
    nm.metric.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double r = curve.rho(j);
        const double rt = d.rho_theta[static_cast<std::size_t>(j)];
        const double g = std::sqrt(r * r + rt * rt);
        const double c = std::cos(curve.theta(j)), s = std::sin(curve.theta(j));
        nm.normal[static_cast<std::size_t>(j)] = {(r * c + rt * s) / g, (r * s - rt * c) / g};
        nm.metric[static_cast<std::size_t>(j)] = g;
    }
    return nm;
}

struct AreaLength {
    double area = 0.0;
    double length = 0.0;
};

/// Rectangle rule on the periodic grid (trapezoidal and rectangle rules
/// coincide for periodic integrands):
///   area = 1/2 sum rho^2 dtheta,  length = sum g dtheta.
inline AreaLength area_length(const PolarCurve& curve) {
    const auto nm = normals_and_metric(curve);
    const double dth = curve.dtheta();
    AreaLength al;
    for (int j = 0; j < curve.n_theta(); ++j) {
        const double r = curve.rho(j);
        al.area += 0.5 * r * r * dth;
        al.length += nm.metric[static_cast<std::size_t>(j)] * dth;
    }
    return al;
}

/// Discrete Lipschitz seminorm of rho on S^1: max_j |rho_theta[j]|.
inline double lipschitz_norm(const PolarCurve& curve) {
    const auto d = curve_derivatives(curve);
    double m = 0.0;
    for (double v : d.rho_theta) m = std::max(m, std::abs(v));
    return m;
}

/// True iff min_j H[j] > margin.
inline bool is_strictly_convex(const PolarCurve& curve, double margin = 0.0) {
    if (margin < 0.0) throw ValidationError("convexity margin must be >= 0");
    const auto h = curvature(curve);
    return *std::min_element(h.begin(), h.end()) > margin;
}

/// Set inclusion for curves star-shaped about the origin: inner is contained
/// in outer iff inner.rho[j] <= outer.rho[j] at every node (non-strict).
inline bool contains(const PolarCurve& outer, const PolarCurve& inner) {
    if (outer.n_theta() != inner.n_theta())
        throw GridMismatchError("contains: incompatible discretizations (" +
                                std::to_string(outer.n_theta()) + " vs " +
                                std::to_string(inner.n_theta()) + " nodes)");
    for (int j = 0; j < outer.n_theta(); ++j)
        if (inner.rho(j) > outer.rho(j)) return false;
    return true;
}

/// Radial clearance min_j (rho[j] - R) between the curve and the origin-centered
/// ball of radius R. Positive iff B_R is compactly inside; it lower-bounds the
/// Euclidean distance from the boundary to B_R and is exact for circles.
inline double distance_to_ball(const PolarCurve& curve, double ball_radius) {
    if (ball_radius <= 0.0) throw ValidationError("ball radius must be positive");
    double m = std::numeric_limits<double>::infinity();
    for (int j = 0; j < curve.n_theta(); ++j) m = std::min(m, curve.rho(j) - ball_radius);
    return m;
}

/// Exact max pairwise distance between boundary samples. O(n^2); meant for
/// per-run diagnostics, not per-step use.
inline double diameter(const PolarCurve& curve) {
    const int n = curve.n_theta();
    std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        x[static_cast<std::size_t>(j)] = curve.rho(j) * std::cos(curve.theta(j));
        y[static_cast<std::size_t>(j)] = curve.rho(j) * std::sin(curve.theta(j));
    }
    double best = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            const auto ia = static_cast<std::size_t>(a), ib = static_cast<std::size_t>(b);
            const double dx = x[ia] - x[ib], dy = y[ia] - y[ib];
            best = std::max(best, dx * dx + dy * dy);
        }
    return std::sqrt(best);
}

/// Scalar summary of a curve and its boundary trace at one instant.
struct CurveDiagnostics {
    double area = 0.0;
    double length = 0.0;
    double min_rho = 0.0;
    double max_rho = 0.0;
    double min_condition = 0.0;  // min_j (H - u_nu^2)
    double max_abs_unu = 0.0;
    double lipschitz_norm = 0.0;
    double min_curvature = 0.0;
};

}  // namespace capflow
