#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace netmoments {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Construction-time violation of a network invariant.
class ValidationError : public Error {
 public:
  enum class Kind {
    NonSquare,
    AsymmetricEntry,
    NonzeroDiagonal,
    OutOfBounds,
    BoundViolation,
    TooSmall,
  };

  ValidationError(Kind kind, std::string msg, std::ptrdiff_t i = -1,
                  std::ptrdiff_t j = -1)
      : Error(std::move(msg)), kind(kind), i(i), j(j) {}

  Kind kind;
  std::ptrdiff_t i;
  std::ptrdiff_t j;
};

/// Malformed serialized input; the message carries line/field diagnostics.
class DecodeError : public Error {
 public:
  using Error::Error;
};

/// Eigensolver exhausted its iteration budget.
class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

/// Division by a non-positive eigenvector sum; indicates a caller bug.
class ZeroDenominator : public Error {
 public:
  using Error::Error;
};

/// Statistics on degenerate input (constant series, coincident abscissae).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// Singular regression design matrix.
class RankDeficient : public Error {
 public:
  using Error::Error;
};

/// A grid level violates the target invariants.
class InvalidLevel : public Error {
 public:
  using Error::Error;
};

}  // namespace netmoments
