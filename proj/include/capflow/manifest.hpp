#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "capflow/errors.hpp"
#include "capflow/flow.hpp"
#include "capflow/polar_curve.hpp"

namespace capflow {

/// Initial-curve description as written in a manifest: either a circle of
/// radius R or a cosine series base + sum a_k cos(k theta + phase_k).
struct CurveSpec {
    enum class Type { circle, fourier };
    Type type = Type::circle;
    double R = 3.0;
    double base = 0.0;
    std::vector<PolarCurve::FourierMode> modes;

    bool operator==(const CurveSpec&) const = default;

    PolarCurve build(int n_theta) const {
        if (type == Type::circle) return PolarCurve::circle(n_theta, R);
        return PolarCurve::fourier(n_theta, base, modes);
    }
};

struct RunManifest {
    FlowConfig config;
    CurveSpec curve;
    std::string output_dir = ".";
    std::string label = "run";

    bool operator==(const RunManifest&) const = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline double parse_real(std::string_view value, const std::string& key, int line) {
    const std::string v(value);
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw ParseError("key '" + key + "' expects a decimal number, got '" + v + "'", line);
    return x;
}

inline int parse_int(std::string_view value, const std::string& key, int line) {
    const std::string v(value);
    char* end = nullptr;
    const long x = std::strtol(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
        throw ParseError("key '" + key + "' expects an integer, got '" + v + "'", line);
    return static_cast<int>(x);
}

/// mode values are written k,amplitude,phase.
inline PolarCurve::FourierMode parse_mode(std::string_view value, int line) {
    const std::string v(value);
    int k = 0;
    double amp = 0.0, phase = 0.0;
    char tail = '\0';
    const int got = std::sscanf(v.c_str(), " %d , %lf , %lf %c", &k, &amp, &phase, &tail);
    if (got != 3)
        throw ParseError("key 'mode' expects 'k,amplitude,phase', got '" + v + "'", line);
    if (k < 1)
        throw ValidationError("fourier mode index must be >= 1 (k = 0 belongs in base), got " +
                              std::to_string(k));
    return {k, amp, phase};
}

}  // namespace detail

/// Parses the line-oriented manifest format:
///   sections [flow], [curve], [output]; 'key = value' entries; '#' comments.
/// Parsing is strict: unknown sections or keys and duplicated scalar keys are
/// errors, so a typo cannot silently fall back to a default. Structural
/// problems raise ParseError with the line number; semantic problems raise
/// ValidationError naming the violated invariant.
inline RunManifest parse_manifest(std::string_view text) {
    RunManifest m;
    enum class Section { none, flow, curve, output };
    Section section = Section::none;

    std::optional<std::string> curve_type;
    std::optional<double> curve_R, curve_base;
    std::vector<PolarCurve::FourierMode> modes;
    std::vector<std::string> seen;  // section-qualified keys, for duplicate detection

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                                               : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        if (const std::size_t hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError("unterminated section header", line_no);
            const std::string_view name = line.substr(1, line.size() - 2);
            if (name == "flow") section = Section::flow;
            else if (name == "curve") section = Section::curve;
            else if (name == "output") section = Section::output;
            else throw ParseError("unknown section [" + std::string(name) + "]", line_no);
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("expected 'key = value', got '" + std::string(line) + "'", line_no);
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string_view value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError("empty key", line_no);
        if (value.empty()) throw ParseError("empty value for key '" + key + "'", line_no);
        if (section == Section::none)
            throw ParseError("key '" + key + "' appears before any section header", line_no);

        const char* section_name = section == Section::flow    ? "flow"
                                   : section == Section::curve ? "curve"
                                                               : "output";
        if (key != "mode") {
            const std::string qualified = std::string(section_name) + "." + key;
            for (const auto& s : seen)
                if (s == qualified)
                    throw ParseError("duplicate key '" + key + "' in [" + section_name + "]",
                                     line_no);
            seen.push_back(qualified);
        }

        switch (section) {
            case Section::flow:
                if (key == "n_theta") m.config.n_theta = detail::parse_int(value, key, line_no);
                else if (key == "m_s") m.config.m_s = detail::parse_int(value, key, line_no);
                else if (key == "dt") m.config.dt = detail::parse_real(value, key, line_no);
                else if (key == "t_end") m.config.t_end = detail::parse_real(value, key, line_no);
                else if (key == "scheme") {
                    if (value == "imex") m.config.scheme = TimeScheme::imex;
                    else if (value == "explicit") m.config.scheme = TimeScheme::explicit_euler;
                    else throw ParseError("scheme must be 'imex' or 'explicit', got '" +
                                          std::string(value) + "'", line_no);
                } else if (key == "solver_tol")
                    m.config.solver_tol = detail::parse_real(value, key, line_no);
                else if (key == "output_every")
                    m.config.output_every = detail::parse_int(value, key, line_no);
                else if (key == "condition_margin")
                    m.config.condition_margin = detail::parse_real(value, key, line_no);
                else throw ParseError("unknown key '" + key + "' in [flow]", line_no);
                break;
            case Section::curve:
                if (key == "type") curve_type = std::string(value);
                else if (key == "R") curve_R = detail::parse_real(value, key, line_no);
                else if (key == "base") curve_base = detail::parse_real(value, key, line_no);
                else if (key == "mode") modes.push_back(detail::parse_mode(value, line_no));
                else throw ParseError("unknown key '" + key + "' in [curve]", line_no);
                break;
            case Section::output:
                if (key == "dir") m.output_dir = std::string(value);
                else if (key == "label") m.label = std::string(value);
                else throw ParseError("unknown key '" + key + "' in [output]", line_no);
                break;
            case Section::none:
                break;
        }
    }

    if (!curve_type) throw ValidationError("manifest must set curve type ('circle' or 'fourier')");
    if (*curve_type == "circle") {
        m.curve.type = CurveSpec::Type::circle;
        if (!curve_R) throw ValidationError("curve type circle requires key R");
        if (curve_base || !modes.empty())
            throw ValidationError("curve type circle takes only R, not base/mode");
        m.curve.R = *curve_R;
    } else if (*curve_type == "fourier") {
        m.curve.type = CurveSpec::Type::fourier;
        if (!curve_base) throw ValidationError("curve type fourier requires key base");
        if (curve_R) throw ValidationError("curve type fourier takes base/mode, not R");
        m.curve.base = *curve_base;
        m.curve.modes = std::move(modes);
    } else {
        throw ValidationError("curve type must be 'circle' or 'fourier', got '" + *curve_type +
                              "'");
    }

    m.config.validate();
    const PolarCurve initial = m.curve.build(m.config.n_theta);  // throws if any rho <= 1
    if (initial.min_rho() <= 1.0 + m.config.gap_epsilon)
        throw ValidationError("initial curve violates the gap guard: min rho = " +
                              std::to_string(initial.min_rho()) + " <= 1 + " +
                              std::to_string(m.config.gap_epsilon));
    return m;
}

/// Canonical form; parse_manifest(serialize_manifest(m)) == m.
inline std::string serialize_manifest(const RunManifest& m) {
    char buf[160];
    std::string out;
    auto emit_real = [&](const char* key, double v) {
        std::snprintf(buf, sizeof buf, "%s = %.17g\n", key, v);
        out += buf;
    };
    auto emit_int = [&](const char* key, int v) {
        std::snprintf(buf, sizeof buf, "%s = %d\n", key, v);
        out += buf;
    };

    out += "[flow]\n";
    emit_int("n_theta", m.config.n_theta);
    emit_int("m_s", m.config.m_s);
    emit_real("dt", m.config.dt);
    emit_real("t_end", m.config.t_end);
    out += m.config.scheme == TimeScheme::imex ? "scheme = imex\n" : "scheme = explicit\n";
    emit_real("solver_tol", m.config.solver_tol);
    emit_int("output_every", m.config.output_every);
    emit_real("condition_margin", m.config.condition_margin);

    out += "\n[curve]\n";
    if (m.curve.type == CurveSpec::Type::circle) {
        out += "type = circle\n";
        emit_real("R", m.curve.R);
    } else {
        out += "type = fourier\n";
        emit_real("base", m.curve.base);
        for (const auto& mode : m.curve.modes) {
            std::snprintf(buf, sizeof buf, "mode = %d,%.17g,%.17g\n", mode.k, mode.amplitude,
                          mode.phase);
            out += buf;
        }
    }

    out += "\n[output]\n";
    out += "dir = " + m.output_dir + "\n";
    out += "label = " + m.label + "\n";
    return out;
}

}  // namespace capflow
