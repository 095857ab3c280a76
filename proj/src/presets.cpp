#include "qtensor/presets.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "qtensor/errors.hpp"
#include "qtensor/snapshot.hpp"

namespace qtensor {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

VectorField project_velocity(const VectorField& u) {
  Stepper st(u.grid(), ModelParams{}, VariantConfig{});
  return st.project(u);
}

VectorField vortex_velocity(const GridSpec& g, double amplitude) {
  VectorField u(g);
  if (amplitude == 0.0) return u;
  auto factor = [&](int axis, double x, double& f, double& df) {
    const double l = g.length(axis);
    if (g.bc[axis] == BoundaryTag::Periodic) {
      f = std::sin(2 * kPi * x / l);
      df = 2 * kPi / l * std::cos(2 * kPi * x / l);
    } else {
      const double s = std::sin(kPi * x / l);
      f = s * s;
      df = kPi / l * std::sin(2 * kPi * x / l);
    }
  };
  double umax = 0.0;
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        double X, dX, Y, dY;
        factor(0, g.center(0, i), X, dX);
        factor(1, g.center(1, j), Y, dY);
        const std::size_t n = g.index(i, j, k);
        u(0, n) = X * dY;
        u(1, n) = -dX * Y;
        umax = std::max(umax, std::hypot(u(0, n), u(1, n)));
      }
  if (umax > 0.0) u *= amplitude / umax;
  return project_velocity(u);
}

TensorField uniaxial_cosine(const GridSpec& g, double amplitude, std::array<double, 3> director) {
  const double nn = std::sqrt(director[0] * director[0] + director[1] * director[1] + director[2] * director[2]);
  if (!(nn > 0.0)) throw ValidationError({"director must be non-zero"});
  Mat3d shape;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) shape(a, b) = director[a] * director[b] / (nn * nn) - (a == b ? 1.0 / 3.0 : 0.0);
  TensorField q(g);
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double s = amplitude * std::cos(2 * kPi * g.center(0, i) / g.lx) *
                         std::cos(2 * kPi * g.center(1, j) / g.ly);
        q.set_tensor(g.index(i, j, k), s * shape);
      }
  return q;
}

TensorField random_smooth_q(const GridSpec& g, double amplitude, std::uint64_t seed, int modes) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2 * kPi);
  TensorField q(g);
  const int kz_max = g.nz == 1 ? 0 : modes;
  for (int kz = 0; kz <= kz_max; ++kz)
    for (int ky = 0; ky <= modes; ++ky)
      for (int kx = 0; kx <= modes; ++kx) {
        if (kx == 0 && ky == 0 && kz == 0) continue;
        // random symmetric traceless coefficient
        Mat3d a;
        for (int r = 0; r < 3; ++r)
          for (int c = r; c < 3; ++c) a(r, c) = a(c, r) = unit(rng);
        const double tr = trace(a) / 3.0;
        for (int r = 0; r < 3; ++r) a(r, r) -= tr;
        const std::array<int, 3> kk{kx, ky, kz};
        std::array<double, 3> ph{};
        for (int ax = 0; ax < 3; ++ax) ph[ax] = phase(rng);
        const double w = 1.0 / (1.0 + kx * kx + ky * ky + kz * kz);
        for (int k = 0; k < g.nz; ++k)
          for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
              const std::array<int, 3> idx{i, j, k};
              double s = w;
              for (int ax = 0; ax < 3; ++ax) {
                const double x = g.center(ax, idx[ax]);
                const double l = g.length(ax);
                if (g.bc[ax] == BoundaryTag::Periodic)
                  s *= kk[ax] == 0 ? 1.0 : std::cos(2 * kPi * kk[ax] * x / l + ph[ax]);
                else
                  s *= std::cos(kk[ax] * kPi * x / l);
              }
              const std::size_t n = g.index(i, j, k);
              for (int c = 0; c < 9; ++c) q(c, n) += s * a.m[c];
            }
      }
  double qmax = 0.0;
  for (std::size_t n = 0; n < q.cells(); ++n) qmax = std::max(qmax, std::sqrt(frobenius_sq(q.tensor_at(n))));
  if (qmax > 0.0) q *= amplitude / qmax;
  return q;
}

SimState initial_state(const RunConfig& cfg) {
  const GridSpec& g = cfg.grid;
  const ICConfig& ic = cfg.ic;
  if (ic.preset == "snapshot") {
    Snapshot snap = read_snapshot(ic.snapshot, g.bc);
    const GridSpec& sg = snap.q.grid();
    if (sg.nx != g.nx || sg.ny != g.ny || sg.nz != g.nz || sg.lx != g.lx || sg.ly != g.ly || sg.lz != g.lz)
      throw ValidationError({"snapshot " + ic.snapshot + " does not match the configured grid"});
    SimState s;
    s.t = snap.t;
    s.p = std::move(snap.p);
    s.u = std::move(snap.u);
    s.q = std::move(snap.q);
    return s;
  }
  SimState s = SimState::zero(g);
  const double ua = ic.u_amplitude.value_or(ic.preset == "taylor-green-q0" ? 1.0 : 0.0);
  if (ic.preset == "uniaxial-cosine") s.q = uniaxial_cosine(g, ic.amplitude, ic.director);
  if (ic.preset == "random-smooth") s.q = random_smooth_q(g, ic.amplitude, ic.seed, ic.modes);
  if (ic.preset != "zero" || ic.u_amplitude) s.u = vortex_velocity(g, ua);
  return s;
}

}  // namespace qtensor
