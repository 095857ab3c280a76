#include "qtensor/operators.hpp"

#include <vector>

namespace qtensor {

BCKind bc_kind(const GridSpec& g, FieldRole role, int axis) {
  if (g.bc[axis] == BoundaryTag::Periodic) return BCKind::Periodic;
  return role == FieldRole::Velocity ? BCKind::DirichletZero : BCKind::NeumannZero;
}

std::array<BCKind, 3> bc_kinds(const GridSpec& g, FieldRole role) {
  return {bc_kind(g, role, 0), bc_kind(g, role, 1), bc_kind(g, role, 2)};
}

namespace {

struct Neighbors {
  int minus, plus;
  double s_minus, s_plus;
};

std::vector<Neighbors> neighbor_table(int n, BCKind kind) {
  std::vector<Neighbors> t(n);
  const double wall_sign = kind == BCKind::DirichletZero ? -1.0 : 1.0;
  for (int p = 0; p < n; ++p) {
    Neighbors nb{p - 1, p + 1, 1.0, 1.0};
    if (p == 0) {
      if (kind == BCKind::Periodic) {
        nb.minus = n - 1;
      } else {
        nb.minus = 0;
        nb.s_minus = wall_sign;
      }
    }
    if (p == n - 1) {
      if (kind == BCKind::Periodic) {
        nb.plus = 0;
      } else {
        nb.plus = n - 1;
        nb.s_plus = wall_sign;
      }
    }
    t[p] = nb;
  }
  return t;
}

// Calls body(n, p, base) for every cell, where p is the coordinate along
// `axis` and base the linear index of the line's p = 0 cell.
template <typename Body>
void for_each_on_axis(const GridSpec& g, int axis, Body&& body) {
  const std::size_t stride = g.stride(axis);
  const std::size_t planes = static_cast<std::size_t>(g.nz);
  parallel::parallel_for(planes * g.ny, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t jk = lo; jk < hi; ++jk) {
      const int j = static_cast<int>(jk % g.ny);
      const int k = static_cast<int>(jk / g.ny);
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t n = g.index(i, j, k);
        const int p = axis == 0 ? i : (axis == 1 ? j : k);
        body(n, p, n - static_cast<std::size_t>(p) * stride);
      }
    }
  });
}

}  // namespace

void d1_centered(std::span<const double> in, std::span<double> out, const GridSpec& g, int axis,
                 BCKind kind, double scale, bool accumulate) {
  const auto nb = neighbor_table(g.n(axis), kind);
  const std::size_t stride = g.stride(axis);
  const double inv = scale / (2.0 * g.h(axis));
  for_each_on_axis(g, axis, [&](std::size_t n, int p, std::size_t base) {
    const Neighbors& t = nb[p];
    const double v = (t.s_plus * in[base + t.plus * stride] - t.s_minus * in[base + t.minus * stride]) * inv;
    out[n] = accumulate ? out[n] + v : v;
  });
}

void d2_compact(std::span<const double> in, std::span<double> out, const GridSpec& g, int axis,
                BCKind kind, double scale, bool accumulate) {
  const auto nb = neighbor_table(g.n(axis), kind);
  const std::size_t stride = g.stride(axis);
  const double hh = g.h(axis);
  const double inv = scale / (hh * hh);
  for_each_on_axis(g, axis, [&](std::size_t n, int p, std::size_t base) {
    const Neighbors& t = nb[p];
    const double v =
        (t.s_plus * in[base + t.plus * stride] - 2.0 * in[n] + t.s_minus * in[base + t.minus * stride]) * inv;
    out[n] = accumulate ? out[n] + v : v;
  });
}

ScalarField divergence(const VectorField& v, FieldRole role) {
  ScalarField out(v.grid());
  const auto kinds = bc_kinds(v.grid(), role);
  for (int j = 0; j < 3; ++j) d1_centered(v.component(j), out.component(0), v.grid(), j, kinds[j], 1.0, j > 0);
  return out;
}

VectorField tensor_divergence(const TensorField& t, FieldRole role) {
  VectorField out(t.grid());
  const auto kinds = bc_kinds(t.grid(), role);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      d1_centered(t.component(3 * i + j), out.component(i), t.grid(), j, kinds[j], 1.0, j > 0);
  return out;
}

ScalarField projection_laplacian(const ScalarField& phi) {
  return divergence(gradient(phi, FieldRole::Pressure), FieldRole::Velocity);
}

template <int N>
Field<N> advect(const VectorField& u, const Field<N>& f, FieldRole role, bool upwind) {
  if (!(u.grid() == f.grid())) throw GridMismatch("advect: velocity and field grids differ");
  const GridSpec& g = f.grid();
  Field<N> out(g);
  const auto kinds = bc_kinds(g, role);
  for (int axis = 0; axis < 3; ++axis) {
    if (g.n(axis) == 1) continue;
    const auto nb = neighbor_table(g.n(axis), kinds[axis]);
    const std::size_t stride = g.stride(axis);
    const double hh = g.h(axis);
    const auto uc = u.component(axis);
    for (int c = 0; c < N; ++c) {
      const auto in = f.component(c);
      auto o = out.component(c);
      for_each_on_axis(g, axis, [&](std::size_t n, int p, std::size_t base) {
        const Neighbors& t = nb[p];
        const double fp = t.s_plus * in[base + t.plus * stride];
        const double fm = t.s_minus * in[base + t.minus * stride];
        double d;
        if (!upwind) {
          d = (fp - fm) / (2.0 * hh);
        } else {
          d = uc[n] > 0.0 ? (in[n] - fm) / hh : (fp - in[n]) / hh;
        }
        o[n] += uc[n] * d;
      });
    }
  }
  return out;
}

template <int N>
double dirichlet_energy(const Field<N>& f, FieldRole role) {
  const GridSpec& g = f.grid();
  const auto kinds = bc_kinds(g, role);
  double total = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    const int n_ax = g.n(axis);
    if (n_ax == 1) continue;
    const std::size_t stride = g.stride(axis);
    const double inv_h2 = 1.0 / (g.h(axis) * g.h(axis));
    for (int c = 0; c < N; ++c) {
      const auto in = f.component(c);
      total += parallel::sum(f.cells(), [&](std::size_t n) {
        const int i = static_cast<int>(n % g.nx);
        const int j = static_cast<int>((n / g.nx) % g.ny);
        const int k = static_cast<int>(n / (static_cast<std::size_t>(g.nx) * g.ny));
        const int p = axis == 0 ? i : (axis == 1 ? j : k);
        double s = 0.0;
        if (p < n_ax - 1) {
          const double d = in[n + stride] - in[n];
          s += d * d;
        } else if (kinds[axis] == BCKind::Periodic) {
          const double d = in[n - static_cast<std::size_t>(n_ax - 1) * stride] - in[n];
          s += d * d;
        }
        if (kinds[axis] == BCKind::DirichletZero && (p == 0 || p == n_ax - 1)) s += 2.0 * in[n] * in[n];
        return s * inv_h2;
      });
    }
  }
  return total * g.cell_volume();
}

template VectorField advect<3>(const VectorField&, const VectorField&, FieldRole, bool);
template TensorField advect<9>(const VectorField&, const TensorField&, FieldRole, bool);
template ScalarField advect<1>(const VectorField&, const ScalarField&, FieldRole, bool);
template double dirichlet_energy<1>(const ScalarField&, FieldRole);
template double dirichlet_energy<3>(const VectorField&, FieldRole);
template double dirichlet_energy<9>(const TensorField&, FieldRole);

}  // namespace qtensor
