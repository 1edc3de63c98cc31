#ifndef SEMIBAYES_ERRORS_HPP_
#define SEMIBAYES_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace semibayes {

// Invalid dimensions, hyperparameters, or indices passed by the caller.
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Exhaustive enumeration would exceed the configured budget.
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Quadrature or factorization did not reach its tolerance.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Scenario/prior configuration that cannot be honoured.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace semibayes

#endif  // SEMIBAYES_ERRORS_HPP_
