#pragma once

#include <stdexcept>
#include <string>

namespace npbe {

/// Base class for every error raised by the library. The CLI maps these to
/// exit code 1 ("domain error").
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad shape, out of range, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two fields or operators do not live on the same grid.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// The coercivity condition theta*lambda1 - mu > 0 does not hold, so the
/// linear operator is not invertible / not positive definite.
class CoercivityError : public Error {
 public:
  using Error::Error;
};

/// An iterative method ran out of iterations. Carries the last residual.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// The fixed-point iteration ran away from its initial iterate.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace npbe
