#include "qtensor/linear_solvers.hpp"

#include <cmath>
#include <stdexcept>

namespace qtensor {

namespace {

GridSpec line_grid(int n, double h, BoundaryTag tag) {
  GridSpec g;
  g.nx = n;
  g.ny = 1;
  g.nz = 1;
  g.lx = n * h;
  g.ly = 1.0;
  g.lz = 1.0;
  g.bc = {tag, BoundaryTag::Periodic, BoundaryTag::Periodic};
  return g;
}

double norm2(std::span<const double> v) {
  return std::sqrt(parallel::sum(v.size(), [&](std::size_t k) { return v[k] * v[k]; }));
}

double dot(std::span<const double> a, std::span<const double> b) {
  return parallel::sum(a.size(), [&](std::size_t k) { return a[k] * b[k]; });
}

void apply_plane(std::span<const double> in, std::span<double> out, const GridSpec& g, OperatorKind kind,
                 FieldRole role) {
  ScalarField f(g);
  std::copy(in.begin(), in.end(), f.component(0).begin());
  const ScalarField r = apply_operator(f, kind, role);
  std::copy(r.component(0).begin(), r.component(0).end(), out.begin());
}

// Diagonal of the 3D operator, assembled from the 1D matrices.
std::vector<double> operator_diagonal(const GridSpec& g, OperatorKind kind, FieldRole role) {
  std::array<Eigen::VectorXd, 3> d;
  for (int a = 0; a < 3; ++a) d[a] = operator_matrix_1d(g.n(a), g.h(a), g.bc[a], kind, role).diagonal();
  std::vector<double> diag(g.cells());
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) diag[g.index(i, j, k)] = d[0][i] + d[1][j] + d[2][k];
  return diag;
}

// Jacobi-preconditioned CG on s*(alpha I + beta L), s chosen so the operator
// is positive (semi)definite.
SolveReport conjugate_gradient(std::span<const double> b, std::span<double> x, const GridSpec& g, OperatorKind kind,
                               FieldRole role, double alpha, double beta, const SolveOptions& opts) {
  const std::size_t n = b.size();
  const double s = beta > 0.0 ? -1.0 : 1.0;
  const auto diag_l = operator_diagonal(g, kind, role);
  std::vector<double> inv_diag(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double d = s * (alpha + beta * diag_l[k]);
    inv_diag[k] = d > 0.0 ? 1.0 / d : 1.0;
  }
  auto apply = [&](std::span<const double> in, std::span<double> out) {
    apply_plane(in, out, g, kind, role);
    for (std::size_t k = 0; k < n; ++k) out[k] = s * (alpha * in[k] + beta * out[k]);
  };

  std::vector<double> r(n), z(n), p(n), ap(n);
  std::fill(x.begin(), x.end(), 0.0);
  for (std::size_t k = 0; k < n; ++k) r[k] = s * b[k];
  const double bnorm = std::max(norm2(r), opts.residual_floor);
  SolveReport rep;
  if (norm2(r) == 0.0) return rep;
  for (std::size_t k = 0; k < n; ++k) z[k] = inv_diag[k] * r[k];
  p = z;
  double rz = dot(r, z);
  const int max_it = opts.max_iterations > 0 ? opts.max_iterations : static_cast<int>(10 * n);
  double rel = 1.0;
  int it = 0;
  while (it < max_it) {
    apply(p, ap);
    const double pap = dot(p, ap);
    if (pap <= 0.0) break;
    const double step = rz / pap;
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += step * p[k];
      r[k] -= step * ap[k];
    }
    ++it;
    rel = norm2(r) / bnorm;
    if (rel <= opts.tolerance) break;
    for (std::size_t k = 0; k < n; ++k) z[k] = inv_diag[k] * r[k];
    const double rz_new = dot(r, z);
    const double beta_cg = rz_new / rz;
    rz = rz_new;
    for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta_cg * p[k];
  }
  rep.iterations = it;
  rep.relative_residual = rel;
  return rep;
}

}  // namespace

ScalarField apply_operator(const ScalarField& f, OperatorKind kind, FieldRole role) {
  if (kind == OperatorKind::Projection) return projection_laplacian(f);
  return laplacian(f, role);
}

Eigen::MatrixXd operator_matrix_1d(int n, double h, BoundaryTag tag, OperatorKind kind, FieldRole role) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  if (n == 1) return a;
  const GridSpec g = line_grid(n, h, tag);
  std::vector<double> e(n), col(n), tmp(n);
  for (int c = 0; c < n; ++c) {
    std::fill(e.begin(), e.end(), 0.0);
    e[c] = 1.0;
    if (kind == OperatorKind::Compact) {
      d2_compact(e, col, g, 0, bc_kind(g, role, 0));
    } else {
      d1_centered(e, tmp, g, 0, bc_kind(g, FieldRole::Pressure, 0));
      d1_centered(tmp, col, g, 0, bc_kind(g, FieldRole::Velocity, 0));
    }
    for (int r = 0; r < n; ++r) a(r, c) = col[r];
  }
  return a;
}

SeparableSolver::SeparableSolver(const GridSpec& g, OperatorKind kind, FieldRole role)
    : grid_(g), kind_(kind), role_(role) {
  for (int a = 0; a < 3; ++a) {
    const Eigen::MatrixXd m = operator_matrix_1d(g.n(a), g.h(a), g.bc[a], kind, role);
    const double asym = (m - m.transpose()).norm();
    if (asym > 1e-10 * std::max(1.0, m.norm()))
      throw std::logic_error("SeparableSolver: 1D operator is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    basis_[a] = es.eigenvectors();
    lambda_[a] = es.eigenvalues();
    lambda_scale_ += lambda_[a].cwiseAbs().maxCoeff();
  }
}

void SeparableSolver::forward(Eigen::VectorXd& v) const {
  const int nx = grid_.nx, ny = grid_.ny, nz = grid_.nz;
  if (nx > 1) {
    Eigen::Map<Eigen::MatrixXd> x(v.data(), nx, static_cast<Eigen::Index>(ny) * nz);
    x = (basis_[0].transpose() * x).eval();
  }
  if (ny > 1)
    for (int k = 0; k < nz; ++k) {
      Eigen::Map<Eigen::MatrixXd> p(v.data() + static_cast<std::size_t>(k) * nx * ny, nx, ny);
      p = (p * basis_[1]).eval();
    }
  if (nz > 1) {
    Eigen::Map<Eigen::MatrixXd> p(v.data(), static_cast<Eigen::Index>(nx) * ny, nz);
    p = (p * basis_[2]).eval();
  }
}

void SeparableSolver::backward(Eigen::VectorXd& v) const {
  const int nx = grid_.nx, ny = grid_.ny, nz = grid_.nz;
  if (nz > 1) {
    Eigen::Map<Eigen::MatrixXd> p(v.data(), static_cast<Eigen::Index>(nx) * ny, nz);
    p = (p * basis_[2].transpose()).eval();
  }
  if (ny > 1)
    for (int k = 0; k < nz; ++k) {
      Eigen::Map<Eigen::MatrixXd> p(v.data() + static_cast<std::size_t>(k) * nx * ny, nx, ny);
      p = (p * basis_[1].transpose()).eval();
    }
  if (nx > 1) {
    Eigen::Map<Eigen::MatrixXd> x(v.data(), nx, static_cast<Eigen::Index>(ny) * nz);
    x = (basis_[0] * x).eval();
  }
}

void SeparableSolver::solve(std::span<const double> rhs, std::span<double> x, double alpha, double beta) const {
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  forward(v);
  const double null_tol = 1e-11 * (std::fabs(alpha) + std::fabs(beta) * lambda_scale_);
  for (int k = 0; k < grid_.nz; ++k)
    for (int j = 0; j < grid_.ny; ++j)
      for (int i = 0; i < grid_.nx; ++i) {
        const std::size_t n = grid_.index(i, j, k);
        const double d = alpha + beta * (lambda_[0][i] + lambda_[1][j] + lambda_[2][k]);
        v[static_cast<Eigen::Index>(n)] = std::fabs(d) <= null_tol ? 0.0 : v[static_cast<Eigen::Index>(n)] / d;
      }
  backward(v);
  std::copy(v.data(), v.data() + v.size(), x.begin());
}

const SeparableSolver& SolverWorkspace::get(OperatorKind kind, FieldRole role) {
  // Compact Neumann operators coincide for Pressure, OrderTensor and Stress.
  if (kind == OperatorKind::Compact && role != FieldRole::Velocity) role = FieldRole::Pressure;
  if (kind == OperatorKind::Projection) role = FieldRole::Pressure;
  auto& slot = cache_[{kind, role}];
  if (!slot) slot = std::make_unique<SeparableSolver>(grid_, kind, role);
  return *slot;
}

template <int N>
Field<N> solve_shifted(SolverWorkspace& ws, const Field<N>& rhs, OperatorKind kind, FieldRole role, double alpha,
                       double beta, const SolveOptions& opts, SolveReport* report) {
  if (!(rhs.grid() == ws.grid())) throw GridMismatch("solve_shifted: workspace grid differs from rhs grid");
  if (!rhs.all_finite()) throw NumericalBlowup("non-finite right-hand side in a linear solve");
  const GridSpec& g = rhs.grid();
  Field<N> x(g);
  SolveReport worst;
  std::vector<double> lx(g.cells());
  for (int c = 0; c < N; ++c) {
    const auto b = rhs.component(c);
    auto xc = x.component(c);
    const double raw_norm = norm2(b);
    if (raw_norm == 0.0) continue;
    const double bnorm = std::max(raw_norm, opts.residual_floor);
    SolveReport rep;
    if (opts.backend == SolverBackend::Spectral) {
      ws.get(kind, role).solve(b, xc, alpha, beta);
      apply_plane(xc, lx, g, kind, role);
      double rr = 0.0;
      for (std::size_t n = 0; n < g.cells(); ++n) {
        const double r = alpha * xc[n] + beta * lx[n] - b[n];
        rr += r * r;
      }
      rep.relative_residual = std::sqrt(rr) / bnorm;
    } else {
      rep = conjugate_gradient(b, xc, g, kind, role, alpha, beta, opts);
      if (alpha == 0.0) {
        double mean = 0.0;
        for (double v : xc) mean += v;
        mean /= static_cast<double>(xc.size());
        for (double& v : xc) v -= mean;
      }
    }
    if (!(rep.relative_residual <= opts.tolerance))
      throw SolverError("linear solve did not reach tolerance", rep.relative_residual, rep.iterations);
    worst.relative_residual = std::max(worst.relative_residual, rep.relative_residual);
    worst.iterations = std::max(worst.iterations, rep.iterations);
  }
  if (report) *report = worst;
  return x;
}

template ScalarField solve_shifted<1>(SolverWorkspace&, const ScalarField&, OperatorKind, FieldRole, double, double,
                                      const SolveOptions&, SolveReport*);
template VectorField solve_shifted<3>(SolverWorkspace&, const VectorField&, OperatorKind, FieldRole, double, double,
                                      const SolveOptions&, SolveReport*);
template TensorField solve_shifted<9>(SolverWorkspace&, const TensorField&, OperatorKind, FieldRole, double, double,
                                      const SolveOptions&, SolveReport*);

ScalarField solve_poisson(const ScalarField& rhs, FieldRole role, OperatorKind kind, const SolveOptions& opts,
                          SolveReport* report) {
  SolverWorkspace ws(rhs.grid());
  return solve_shifted(ws, rhs, kind, role, 0.0, 1.0, opts, report);
}

TensorField solve_helmholtz(const TensorField& rhs, double sigma, const SolveOptions& opts, SolveReport* report) {
  if (!(sigma > 0.0)) throw std::invalid_argument("solve_helmholtz: sigma must be > 0");
  SolverWorkspace ws(rhs.grid());
  return solve_shifted(ws, rhs, OperatorKind::Compact, FieldRole::OrderTensor, 1.0, -sigma, opts, report);
}

}  // namespace qtensor
