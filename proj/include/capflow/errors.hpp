#pragma once

#include <stdexcept>
#include <string>

namespace capflow {

/// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid inputs: broken type invariants, bad configuration values,
/// incompatible argument combinations.
struct ValidationError : Error {
    using Error::Error;
};

/// Two discretizations that must share a grid do not.
struct GridMismatchError : ValidationError {
    using ValidationError::ValidationError;
};

/// Manifest text that cannot be parsed. Carries the offending line number.
struct ParseError : Error {
    ParseError(const std::string& what, int line_number)
        : Error(what + " (line " + std::to_string(line_number) + ")"), line(line_number) {}
    int line;
};

/// The geometry left the admissible regime (e.g. the curve touched the
/// inner obstacle).
struct GeometryError : Error {
    using Error::Error;
};

/// A linear solve failed to reach its residual contract. Carries the best
/// relative residual achieved.
struct SolverError : Error {
    SolverError(const std::string& what, double achieved_residual)
        : Error(what), residual(achieved_residual) {}
    double residual;
};

/// NaN/Inf in an update, stability-bound violation, or an integration that
/// left the domain of the equations.
struct NumericalError : Error {
    using Error::Error;
};

/// File system failure while emitting data.
struct IoError : Error {
    using Error::Error;
};

}  // namespace capflow
