#pragma once

#include <stdexcept>
#include <string>

namespace ergo {

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// sigma(x) <= 0 somewhere in an integration or evaluation range.
struct NonPositiveVolatility : NumericError {
    using NumericError::NumericError;
};

/// Adaptive quadrature hit max_depth without meeting the tolerance.
struct QuadratureFailure : NumericError {
    using NumericError::NumericError;
};

/// A root-finding residual never changed sign on the scan window.
struct NoBracket : NumericError {
    using NumericError::NumericError;
};

/// A solved threshold pair collapsed below the minimal interval width.
struct DegenerateInterval : NumericError {
    using NumericError::NumericError;
};

/// ODE state left the finite range during integration.
struct NonFiniteState : NumericError {
    using NumericError::NumericError;
};

/// The set C_a of barrier-matching candidates is empty.
struct EmptyCa : NumericError {
    using NumericError::NumericError;
};

struct UnknownFamily : NumericError {
    using NumericError::NumericError;
};

/// Config schema violation; carries the offending field path.
struct ConfigError : std::runtime_error {
    std::string field;
    ConfigError(std::string field_, const std::string& msg)
        : std::runtime_error("config field '" + field_ + "': " + msg),
          field(std::move(field_)) {}
};

}  // namespace ergo
