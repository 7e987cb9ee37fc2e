#pragma once

#include <stdexcept>
#include <string>

namespace gasket {

/// Bad user input (nonpositive slope, point outside the projection, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Requested depth is beyond what exhaustive enumeration supports.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A structural fact that must hold for every rational slope was violated.
/// Always a bug in a builder, never a user error.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Argument outside the mathematical domain of the operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace gasket
