#pragma once

#include <stdexcept>
#include <string>

namespace central_approx {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: malformed config, violated precondition, unknown name.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A size guard on an exact enumeration was exceeded.
class GuardError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// The computation itself failed (instability, non-convergence, singularity).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// det(I - D^2g(U'-U)) <= 0 (or its factor-graph analog): the Gaussian
/// fluctuation integral diverges and the central approximation is invalid.
class InstabilityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonConvergenceError : public NumericalError {
 public:
  NonConvergenceError(const std::string& what, double residual)
      : NumericalError(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// The maximizer touches the boundary of the simplex.
class BoundaryError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace central_approx
