#pragma once

#include <stdexcept>
#include <string>

namespace randers {

/// Base of every error thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a function (sqrt of a non-positive jet,
/// zero tangent vector, K < 1, ...).
struct DomainError : Error {
  using Error::Error;
};

/// Division by a jet (or matrix) whose leading value vanishes.
struct SingularValueError : Error {
  using Error::Error;
};

/// A computation needs more Taylor orders than the jet carries.
struct InsufficientOrderError : Error {
  using Error::Error;
};

struct IndexError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

/// y and V span less than a 2-plane.
struct DegenerateFlagError : Error {
  using Error::Error;
};

struct VarianceError : Error {
  using Error::Error;
};

}  // namespace randers
