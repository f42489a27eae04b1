#pragma once

#include <stdexcept>
#include <string>

namespace tvi {

/// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid configuration: bad rule/method combination, malformed run spec,
/// out-of-range order, mismatched dimensions.
struct ConfigError : Error {
  using Error::Error;
};

/// Numerical domain violation: log/sqrt/pow of a nonpositive constant term,
/// division by a series with zero constant term, h = 0 steps.
struct DomainError : Error {
  using Error::Error;
};

/// A linear solve hit a numerically singular matrix.
struct SingularMatrixError : Error {
  using Error::Error;
};

/// File I/O problem: missing or corrupt data table, unwritable output path.
struct IoError : Error {
  using Error::Error;
};

}  // namespace tvi
