#pragma once

#include <stdexcept>
#include <string>

namespace glasslocal {

/// Input outside the mathematical domain of an operation (|t| > 1, q >= 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Iterative procedure failed to converge or produced a non-finite value.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configured resource cap exceeded (tensor budget, enumeration size, Hessian size).
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Shapes of two operands disagree.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace glasslocal
