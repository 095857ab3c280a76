#pragma once

// Second-order finite-difference operators on the cell-centred grid.
//
// Boundary closure is by ghost reflection, one axis at a time:
//   NeumannZero    ghost = mirror value
//   DirichletZero  ghost = -mirror value (field vanishes on the wall face)
//   Periodic       wrap around
// Box edges and corners are handled by applying each axis' rule
// independently.

#include <array>
#include <span>

#include "qtensor/fields.hpp"

namespace qtensor {

enum class BCKind { DirichletZero, NeumannZero, Periodic };

/// What a field represents; fixes its ghost rule on Wall faces.
///   Velocity     DirichletZero (no slip)
///   OrderTensor  NeumannZero
///   Pressure     NeumannZero
///   Stress       NeumannZero (pairs with Velocity so that the stress
///                divergence is the exact negative adjoint of grad u)
enum class FieldRole { Velocity, OrderTensor, Pressure, Stress };

BCKind bc_kind(const GridSpec& g, FieldRole role, int axis);
std::array<BCKind, 3> bc_kinds(const GridSpec& g, FieldRole role);

// ---------------------------------------------------------------------------
// Plane kernels.  `out` is overwritten unless `accumulate` is set, in which
// case scale * result is added.

void d1_centered(std::span<const double> in, std::span<double> out, const GridSpec& g, int axis,
                 BCKind kind, double scale = 1.0, bool accumulate = false);
void d2_compact(std::span<const double> in, std::span<double> out, const GridSpec& g, int axis,
                BCKind kind, double scale = 1.0, bool accumulate = false);

// ---------------------------------------------------------------------------
// Field operators

/// Component c of the input yields output components 3*c + k = d_k f_c.
/// For a velocity this is (grad u)_ij = d_j u_i.
template <int N>
Field<3 * N> gradient(const Field<N>& f, FieldRole role) {
  Field<3 * N> out(f.grid());
  const auto kinds = bc_kinds(f.grid(), role);
  for (int c = 0; c < N; ++c)
    for (int k = 0; k < 3; ++k) d1_centered(f.component(c), out.component(3 * c + k), f.grid(), k, kinds[k]);
  return out;
}

/// sum_j d_j v_j
ScalarField divergence(const VectorField& v, FieldRole role = FieldRole::Velocity);

/// Row-wise: out_i = sum_j d_j T_ij
VectorField tensor_divergence(const TensorField& t, FieldRole role = FieldRole::Stress);

/// Compact 7-point Laplacian, componentwise.
template <int N>
Field<N> laplacian(const Field<N>& f, FieldRole role) {
  Field<N> out(f.grid());
  const auto kinds = bc_kinds(f.grid(), role);
  for (int c = 0; c < N; ++c) {
    bool first = true;
    for (int k = 0; k < 3; ++k) {
      if (f.grid().n(k) == 1) continue;
      d2_compact(f.component(c), out.component(c), f.grid(), k, kinds[k], 1.0, !first);
      first = false;
    }
  }
  return out;
}

/// divergence(Velocity rule) o gradient(Pressure rule): the operator whose
/// inverse makes the projected velocity exactly discretely solenoidal.
ScalarField projection_laplacian(const ScalarField& phi);

/// (u . grad) f, componentwise.  Centred by default; `upwind` switches to
/// first-order donor-cell differences.
template <int N>
Field<N> advect(const VectorField& u, const Field<N>& f, FieldRole role, bool upwind = false);

/// Discrete Dirichlet energy ||grad f||^2 with the identity
/// dirichlet_energy(f) == -<f, laplacian(f)> (midpoint-weighted) exactly.
template <int N>
double dirichlet_energy(const Field<N>& f, FieldRole role);

/// Midpoint-rule inner product sum_c sum_n a b * cell volume.
template <int N>
double inner(const Field<N>& a, const Field<N>& b) {
  a.require_same_grid(b);
  const double vol = a.grid().cell_volume();
  return vol * parallel::sum(a.size(), [&](std::size_t k) { return a.data()[k] * b.data()[k]; });
}

}  // namespace qtensor
