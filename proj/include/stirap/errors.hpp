#pragma once

#include <stdexcept>
#include <string>

namespace stirap {

/// Configuration / input errors. CLI maps these to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Integrator failures (step underflow, norm drift). CLI exit code 3.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Fock-space cutoff too small for the requested state.
struct TruncationError : std::runtime_error {
    explicit TruncationError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace stirap
