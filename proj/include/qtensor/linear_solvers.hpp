#pragma once

// Linear solves for the pressure projection and the implicit Q diffusion.
//
// Every operator used here is a sum of per-axis 1D operators, each symmetric
// under the midpoint inner product for the ghost rules in operators.hpp.  The
// default backend diagonalises each 1D operator once (an orthonormal
// trigonometric-type basis) and solves by transforming along each axis; a
// Jacobi-preconditioned conjugate-gradient backend is kept as an independent
// route and for cross-checks.

#include <array>
#include <map>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qtensor/fields.hpp"
#include "qtensor/operators.hpp"

namespace qtensor {

/// Compact: 7-point Laplacian with the role's ghost rule.
/// Projection: divergence(Velocity) o gradient(Pressure), see
///             projection_laplacian().
enum class OperatorKind { Compact, Projection };

enum class SolverBackend { Spectral, ConjugateGradient };

struct SolveOptions {
  double tolerance = 1e-10;  // relative residual
  /// Residuals are measured against max(||rhs||, residual_floor); callers
  /// whose rhs is itself at round-off level pass the scale it is noise on.
  double residual_floor = 0.0;
  int max_iterations = 0;    // CG only; 0 means 10 * cells
  SolverBackend backend = SolverBackend::Spectral;
};

struct SolveReport {
  double relative_residual = 0.0;
  int iterations = 0;
};

/// Applies the discrete operator L of the given kind to a scalar plane.
ScalarField apply_operator(const ScalarField& f, OperatorKind kind, FieldRole role);

/// (alpha I + beta L) x = b by per-axis eigen-decomposition.
///
/// When alpha == 0 the null space of L is projected out of the solution, so
/// a Poisson solution has zero mean.
class SeparableSolver {
 public:
  SeparableSolver(const GridSpec& g, OperatorKind kind, FieldRole role);

  void solve(std::span<const double> rhs, std::span<double> x, double alpha, double beta) const;

  const GridSpec& grid() const { return grid_; }
  OperatorKind kind() const { return kind_; }
  FieldRole role() const { return role_; }
  /// Eigenvalues of the 1D operator along an axis (ascending).
  const Eigen::VectorXd& eigenvalues(int axis) const { return lambda_[axis]; }

 private:
  void forward(Eigen::VectorXd& v) const;
  void backward(Eigen::VectorXd& v) const;

  GridSpec grid_;
  OperatorKind kind_;
  FieldRole role_;
  std::array<Eigen::MatrixXd, 3> basis_;
  std::array<Eigen::VectorXd, 3> lambda_;
  double lambda_scale_ = 0.0;
};

/// Dense matrix of a 1D operator on n cells (row-major, used for building
/// the per-axis bases and in tests).
Eigen::MatrixXd operator_matrix_1d(int n, double h, BoundaryTag tag, OperatorKind kind, FieldRole role);

/// Caches one SeparableSolver per (kind, role).  One solve at a time per
/// workspace; independent workspaces may be used concurrently.
class SolverWorkspace {
 public:
  explicit SolverWorkspace(const GridSpec& g) : grid_(g) {}
  const SeparableSolver& get(OperatorKind kind, FieldRole role);
  const GridSpec& grid() const { return grid_; }

 private:
  GridSpec grid_;
  std::map<std::pair<OperatorKind, FieldRole>, std::unique_ptr<SeparableSolver>> cache_;
};

/// Solves (alpha I + beta L) x = b componentwise, checking the residual.
/// Throws SolverError when the relative residual exceeds the tolerance.
template <int N>
Field<N> solve_shifted(SolverWorkspace& ws, const Field<N>& rhs, OperatorKind kind, FieldRole role, double alpha,
                       double beta, const SolveOptions& opts = {}, SolveReport* report = nullptr);

/// L phi = rhs, zero-mean solution.  rhs must be compatible (zero mean for
/// the compact operator); a caller that forgets gets a SolverError.
ScalarField solve_poisson(const ScalarField& rhs, FieldRole role = FieldRole::Pressure,
                          OperatorKind kind = OperatorKind::Compact, const SolveOptions& opts = {},
                          SolveReport* report = nullptr);

/// (I - sigma * Laplacian_Neumann) Q = rhs, componentwise; sigma > 0.
/// This is one backward-Euler step of dw/dt = gamma*epsilon*Lap(w) + f
/// with sigma = dt*gamma*epsilon.
TensorField solve_helmholtz(const TensorField& rhs, double sigma, const SolveOptions& opts = {},
                            SolveReport* report = nullptr);

}  // namespace qtensor
