#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qtensor/operators.hpp"

using namespace qtensor;
using std::numbers::pi;

namespace {

using Fn = std::function<double(double, double, double)>;

ScalarField sample(const GridSpec& g, const Fn& f) {
  ScalarField s(g);
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) s(0, g.index(i, j, k)) = f(g.center(0, i), g.center(1, j), g.center(2, k));
  return s;
}

VectorField sample3(const GridSpec& g, const Fn& fx, const Fn& fy, const Fn& fz) {
  VectorField v(g);
  const ScalarField a = sample(g, fx), b = sample(g, fy), c = sample(g, fz);
  for (std::size_t n = 0; n < g.cells(); ++n) {
    v(0, n) = a(0, n);
    v(1, n) = b(0, n);
    v(2, n) = c(0, n);
  }
  return v;
}

GridSpec box(int n, BoundaryTag tx, BoundaryTag ty = BoundaryTag::Periodic, int nz = 1, double lx = 1.0) {
  return GridSpec::make(n, n, nz, lx, 1.0, 1.0, {tx, ty, BoundaryTag::Periodic});
}

double max_err(const ScalarField& a, const ScalarField& b) { return max_deviation(a, b); }

ScalarField component(const VectorField& v, int c) {
  ScalarField s(v.grid());
  for (std::size_t n = 0; n < v.cells(); ++n) s(0, n) = v(c, n);
  return s;
}

ScalarField random_scalar(const GridSpec& g, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  ScalarField s(g);
  for (double& v : s.data()) v = nd(rng);
  return s;
}

const Fn kZero = [](double, double, double) { return 0.0; };

}  // namespace

TEST_CASE("role to boundary rule map") {
  const GridSpec g = GridSpec::make(8, 8, 8, 1, 1, 1, {BoundaryTag::Wall, BoundaryTag::Periodic, BoundaryTag::Wall});
  CHECK(bc_kind(g, FieldRole::Velocity, 0) == BCKind::DirichletZero);
  CHECK(bc_kind(g, FieldRole::OrderTensor, 0) == BCKind::NeumannZero);
  CHECK(bc_kind(g, FieldRole::Pressure, 2) == BCKind::NeumannZero);
  for (auto role : {FieldRole::Velocity, FieldRole::OrderTensor, FieldRole::Pressure, FieldRole::Stress})
    CHECK(bc_kind(g, role, 1) == BCKind::Periodic);
}

TEST_CASE("gradient examples") {
  SUBCASE("constant with Neumann walls") {
    const GridSpec g = box(8, BoundaryTag::Wall, BoundaryTag::Wall);
    const ScalarField c = sample(g, [](double, double, double) { return 3.7; });
    CHECK(max_abs(gradient(c, FieldRole::OrderTensor)) == 0.0);
  }
  SUBCASE("linear on a periodic axis, seam excluded") {
    const GridSpec g = box(16, BoundaryTag::Periodic);
    const VectorField d = gradient(sample(g, [](double x, double, double) { return x; }), FieldRole::Pressure);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 1; i < g.nx - 1; ++i) CHECK(d(0, g.index(i, j, 0)) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("Neumann eigenfunction, second order") {
    double prev = 0.0;
    for (int n : {16, 32, 64}) {
      const GridSpec g = box(n, BoundaryTag::Wall, BoundaryTag::Periodic, 1, 2.0);
      const double k = pi / 2.0;
      const VectorField d = gradient(sample(g, [&](double x, double, double) { return std::cos(k * x); }),
                                     FieldRole::OrderTensor);
      const ScalarField exact = sample(g, [&](double x, double, double) { return -k * std::sin(k * x); });
      const double e = max_err(component(d, 0), exact);
      CHECK(e < 2.0 * k * k * k * g.hx() * g.hx());
      if (prev > 0.0) CHECK(prev / e == doctest::Approx(4.0).epsilon(0.15));
      prev = e;
    }
  }
}

TEST_CASE("divergence examples") {
  SUBCASE("constant tensor") {
    const GridSpec g = GridSpec::make(8, 8, 8, 1, 1, 1, {BoundaryTag::Wall, BoundaryTag::Periodic, BoundaryTag::Wall});
    CHECK(max_abs(tensor_divergence(constant_tensor(g, Mat3d{{1, 2, 3, 4, 5, 6, 7, 8, 9}}), FieldRole::OrderTensor)) ==
          0.0);
  }
  SUBCASE("rotation field") {
    const GridSpec g = box(16, BoundaryTag::Periodic);
    const VectorField v = sample3(g, [](double, double y, double) { return y; },
                                  [](double x, double, double) { return -x; }, kZero);
    CHECK(max_abs(divergence(v)) == 0.0);
  }
  SUBCASE("divergence of a gradient approximates the Laplacian") {
    double prev = 0.0;
    for (int n : {16, 32, 64}) {
      const GridSpec g = box(n, BoundaryTag::Periodic);
      const Fn s = [](double x, double y, double) { return std::sin(2 * pi * x) * std::cos(2 * pi * y); };
      const ScalarField dd = divergence(gradient(sample(g, s), FieldRole::Pressure), FieldRole::Pressure);
      const ScalarField exact = sample(g, [&](double x, double y, double z) { return -8 * pi * pi * s(x, y, z); });
      const double e = max_err(dd, exact);
      if (prev > 0.0) CHECK(prev / e == doctest::Approx(4.0).epsilon(0.15));
      prev = e;
    }
  }
}

TEST_CASE("laplacian examples") {
  SUBCASE("constant") {
    for (auto tag : {BoundaryTag::Periodic, BoundaryTag::Wall}) {
      const GridSpec g = box(8, tag, tag);
      const ScalarField c = sample(g, [](double, double, double) { return -2.5; });
      CHECK(max_abs(laplacian(c, FieldRole::OrderTensor)) == 0.0);
    }
  }
  SUBCASE("Neumann eigenfunction") {
    double prev = 0.0;
    for (int n : {16, 32, 64}) {
      const GridSpec g = box(n, BoundaryTag::Wall, BoundaryTag::Wall);
      const ScalarField f = sample(g, [](double x, double, double) { return std::cos(pi * x); });
      const ScalarField exact = sample(g, [](double x, double, double) { return -pi * pi * std::cos(pi * x); });
      const double e = max_err(laplacian(f, FieldRole::OrderTensor), exact);
      if (prev > 0.0) CHECK(prev / e == doctest::Approx(4.0).epsilon(0.15));
      prev = e;
    }
  }
  SUBCASE("linear profile against no-slip walls, 6 cells") {
    // ghost = -mirror: the x = 0 wall sees f(0) = 0 so nothing changes there;
    // at x = 1 the reflected ghost is -(1 - h/2), giving -2/h^2.
    const GridSpec g = GridSpec::make(6, 4, 1, 1, 1, 1, {BoundaryTag::Wall, BoundaryTag::Periodic, BoundaryTag::Periodic});
    const ScalarField f = sample(g, [](double x, double, double) { return x; });
    const ScalarField l = laplacian(f, FieldRole::Velocity);
    const double h = g.hx();
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < 5; ++i) CHECK(std::fabs(l(0, g.index(i, j, 0))) <= 1e-10);
      CHECK(l(0, g.index(5, j, 0)) == doctest::Approx(-2.0 / (h * h)).epsilon(1e-12));
    }
  }
}

TEST_CASE("advection examples") {
  const GridSpec g = box(32, BoundaryTag::Periodic);
  const ScalarField f = sample(g, [](double x, double, double) { return std::sin(2 * pi * x); });
  CHECK(max_abs(advect(VectorField(g), f, FieldRole::OrderTensor)) == 0.0);
  const VectorField u = sample3(g, [](double x, double, double) { return 1 + x; },
                                [](double, double y, double) { return y * y; }, kZero);
  CHECK(max_abs(advect(u, sample(g, [](double, double, double) { return 4.0; }), FieldRole::OrderTensor)) == 0.0);

  double prev = 0.0;
  for (int n : {16, 32, 64}) {
    const GridSpec gn = box(n, BoundaryTag::Periodic);
    const VectorField un = sample3(gn, [](double, double, double) { return 1.0; }, kZero, kZero);
    const ScalarField fn = sample(gn, [](double x, double, double) { return std::sin(2 * pi * x); });
    const ScalarField exact = sample(gn, [](double x, double, double) { return 2 * pi * std::cos(2 * pi * x); });
    const double e = max_err(advect(un, fn, FieldRole::OrderTensor), exact);
    if (prev > 0.0) CHECK(prev / e == doctest::Approx(4.0).epsilon(0.15));
    prev = e;
  }
  SUBCASE("upwind is first order") {
    std::vector<double> errs;
    for (int n : {32, 64, 128}) {
      const GridSpec gn = box(n, BoundaryTag::Periodic);
      const VectorField un = sample3(gn, [](double, double, double) { return -1.0; }, kZero, kZero);
      const ScalarField fn = sample(gn, [](double x, double, double) { return std::sin(2 * pi * x); });
      const ScalarField exact = sample(gn, [](double x, double, double) { return -2 * pi * std::cos(2 * pi * x); });
      errs.push_back(max_err(advect(un, fn, FieldRole::OrderTensor, true), exact));
    }
    CHECK(errs[0] / errs[1] == doctest::Approx(2.0).epsilon(0.15));
    CHECK(errs[1] / errs[2] == doctest::Approx(2.0).epsilon(0.15));
  }
}

TEST_CASE("property: discrete adjointness of divergence and gradient") {
  std::mt19937_64 rng(21);
  for (auto tag : {BoundaryTag::Periodic, BoundaryTag::Wall}) {
    const GridSpec g = GridSpec::make(8, 7, 6, 1.0, 0.7, 1.3, {tag, BoundaryTag::Periodic, tag});
    for (int rep = 0; rep < 5; ++rep) {
      const ScalarField s = random_scalar(g, rng);
      VectorField v(g);
      for (int c = 0; c < 3; ++c) {
        const ScalarField r = random_scalar(g, rng);
        for (std::size_t n = 0; n < g.cells(); ++n) v(c, n) = r(0, n);
      }
      const double lhs = inner(divergence(v, FieldRole::Velocity), s);
      const double rhs = -inner(v, gradient(s, FieldRole::Pressure));
      // the reflection rules pair up so the boundary terms cancel exactly
      CHECK(std::fabs(lhs - rhs) <= 1e-12 * (std::fabs(lhs) + 1.0));
    }
  }
}

TEST_CASE("property: projection laplacian is divergence of gradient") {
  std::mt19937_64 rng(22);
  for (auto tag : {BoundaryTag::Periodic, BoundaryTag::Wall}) {
    const GridSpec g = GridSpec::make(8, 8, 8, 1, 1, 1, {tag, tag, tag});
    const ScalarField s = random_scalar(g, rng);
    const ScalarField a = projection_laplacian(s);
    const ScalarField b = divergence(gradient(s, FieldRole::Pressure), FieldRole::Velocity);
    CHECK(max_err(a, b) <= 1e-12 * max_abs(a));
  }
}

TEST_CASE("property: compact laplacian is the face-difference composition") {
  std::mt19937_64 rng(23);
  for (auto role : {FieldRole::OrderTensor, FieldRole::Velocity}) {
    const GridSpec g = GridSpec::make(8, 8, 8, 1, 1, 1, {BoundaryTag::Wall, BoundaryTag::Periodic, BoundaryTag::Wall});
    const ScalarField s = random_scalar(g, rng);
    const double e = dirichlet_energy(s, role);
    CHECK(e > 0.0);
    CHECK(e == doctest::Approx(-inner(s, laplacian(s, role))).epsilon(1e-12));
  }
}

TEST_CASE("property: gradient refinement order on a walled box") {
  const Fn f = [](double x, double y, double z) { return std::cos(pi * x) * std::cos(2 * pi * y) * std::cos(pi * z); };
  std::vector<double> eg, el;
  for (int n : {12, 24, 48}) {
    const GridSpec g = GridSpec::make(n, n, n, 1, 1, 1, {BoundaryTag::Wall, BoundaryTag::Periodic, BoundaryTag::Wall});
    const ScalarField s = sample(g, f);
    const VectorField d = gradient(s, FieldRole::OrderTensor);
    const ScalarField dy = sample(g, [](double x, double y, double z) {
      return -2 * pi * std::cos(pi * x) * std::sin(2 * pi * y) * std::cos(pi * z);
    });
    eg.push_back(max_err(component(d, 1), dy));
    const ScalarField lap = sample(g, [&](double x, double y, double z) { return -6 * pi * pi * f(x, y, z); });
    el.push_back(max_err(laplacian(s, FieldRole::OrderTensor), lap));
  }
  for (int k = 0; k < 2; ++k) {
    CHECK(eg[k] / eg[k + 1] == doctest::Approx(4.0).epsilon(0.15));
    CHECK(el[k] / el[k + 1] == doctest::Approx(4.0).epsilon(0.15));
  }
}
