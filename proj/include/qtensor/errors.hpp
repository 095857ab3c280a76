#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qtensor {

/// Invalid user-supplied configuration or domain object.  Carries every
/// violation found, not just the first.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Two fields that must share a grid do not.
class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A linear solve missed its tolerance.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double relative_residual, int iterations);
  double relative_residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// A time step was refused because it violates the CFL target.
class StepRejected : public std::runtime_error {
 public:
  StepRejected(const std::string& what, double suggested_dt);
  double suggested_dt() const noexcept { return suggested_dt_; }

 private:
  double suggested_dt_;
};

/// NaN or Inf appeared in the evolving state.
class NumericalBlowup : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed snapshot, CSV or config text.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qtensor
