#pragma once

#include <stdexcept>
#include <string>

namespace hetcell {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Point pattern (or association input) with no access points.
class EmptyPatternError : public Error {
 public:
  using Error::Error;
};

// The requested integral does not exist (e.g. a singular kernel at r -> 0).
class DivergenceError : public Error {
 public:
  using Error::Error;
};

// Numerical quadrature did not reach the requested accuracy.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double achieved_error)
      : Error(what + " (achieved error estimate " + std::to_string(achieved_error) + ")"),
        achieved_error_(achieved_error) {}

  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

// Not enough replications or samples for the requested statistic.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace hetcell
