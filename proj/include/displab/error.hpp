#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace displab {

/// Base of every error raised by the library. The CLI maps the concrete
/// type onto a process exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sizes that violate a minimum (system order, stencil width, lattice extent).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Tridiagonal matrix that is not strictly diagonally dominant.
class DominanceError : public Error {
public:
    using Error::Error;
};

/// API misuse: wrong derivative kind, layout mismatch, bad flag value.
class UsageError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Unknown benchmark problem name or parameter.
class RegistryError : public Error {
public:
    using Error::Error;
};

/// Error metric requested for a problem without an exact solution.
class UnsupportedMetricError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// A non-finite value appeared while integrating. `stage` is the SSPRK3 stage
/// (1..3) whose output was first found non-finite.
class DivergenceError : public Error {
public:
    DivergenceError(int stage, const std::string& what)
        : Error(what), stage_(stage) {}

    int stage() const noexcept { return stage_; }

private:
    int stage_;
};

}  // namespace displab
