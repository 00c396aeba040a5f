#pragma once

#include <stdexcept>
#include <string>

namespace sgspline {

/// Raised when a linear solve, rank check or Jacobian inversion breaks down.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by iterative solvers that exhaust their iteration budget.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double best_residual)
      : NumericalError(what), best_residual_(best_residual) {}

  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

}  // namespace sgspline
