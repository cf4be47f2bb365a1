#pragma once

#include <stdexcept>
#include <string>

namespace dklb {

/// A precondition on user input or configuration was violated.
/// The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation produced NaN/Inf, overflowed, or failed to converge
/// in a way that makes its result unusable. The CLI maps this to exit code 1.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dklb
