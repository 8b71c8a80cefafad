#pragma once

#include <stdexcept>
#include <string>

namespace scars {

/// Raised when inputs violate a documented precondition (bad matrix, bad
/// grid, unknown config key). The CLI maps it to exit status 1.
class validation_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a computed quantity fails one of its self-checks (unitarity,
/// trace identity, Newton convergence). The CLI maps it to exit status 2.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw validation_error(message);
}

}  // namespace scars
