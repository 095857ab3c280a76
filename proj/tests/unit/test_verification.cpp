#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "qtensor/checks.hpp"
#include "qtensor/verification.hpp"

using namespace qtensor;
using std::numbers::pi;

namespace {

GridSpec box(int n, BoundaryTag tag, int nz = 1) {
  return GridSpec::make(n, n, nz, 1.0, 1.3, 0.8, {tag, tag, nz == 1 ? BoundaryTag::Periodic : tag});
}

std::array<double, 3> random_point(std::mt19937_64& rng, const GridSpec& g) {
  std::uniform_real_distribution<double> u(0, 1);
  return {u(rng) * g.lx, u(rng) * g.ly, u(rng) * g.lz};
}

}  // namespace

TEST_CASE("trig expressions differentiate exactly") {
  std::mt19937_64 rng(71);
  TrigExpr e({TrigTerm{0.7, 3.0, 0.2, {2.0, 1.0, 0.0}, {0.1, -0.4, 0.0}},
              TrigTerm{-1.2, 0.0, 0.0, {0.0, 3.0, 1.5}, {0.0, 0.3, 1.0}}});
  std::uniform_real_distribution<double> u(0, 1);
  for (int rep = 0; rep < 20; ++rep) {
    const std::array<double, 3> x{u(rng), u(rng), u(rng)};
    const double t = u(rng);
    const double d = 1e-5;
    for (int a = 0; a < 3; ++a) {
      auto xp = x, xm = x;
      xp[a] += d;
      xm[a] -= d;
      const double fd = (e.eval(xp, t) - e.eval(xm, t)) / (2 * d);
      std::array<int, 3> m{0, 0, 0};
      m[a] = 1;
      CHECK(e.eval(x, t, m) == doctest::Approx(fd).epsilon(1e-8).scale(1.0));
      CHECK(e.derivative(a).eval(x, t) == doctest::Approx(e.eval(x, t, m)).epsilon(1e-14).scale(1.0));
    }
    const double ft = (e.eval(x, t + d) - e.eval(x, t - d)) / (2 * d);
    CHECK(e.eval(x, t, {0, 0, 0}, 1) == doctest::Approx(ft).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("manufactured case is compatible with the boundary conditions") {
  std::mt19937_64 rng(72);
  for (auto tag : {BoundaryTag::Periodic, BoundaryTag::Wall}) {
    const GridSpec g = box(16, tag, 16);
    const ManufacturedCase c = ManufacturedCase::standard(g);
    for (int rep = 0; rep < 20; ++rep) {
      const auto x = random_point(rng, g);
      const double t = 0.37 * rep;
      double div = 0.0;
      for (int a = 0; a < 3; ++a) {
        std::array<int, 3> m{0, 0, 0};
        m[a] = 1;
        div += c.u[a].eval(x, t, m);
      }
      CHECK(std::fabs(div) <= 1e-12);
      // symmetric traceless Q
      double tr = 0.0;
      for (int i = 0; i < 3; ++i) {
        tr += c.q[4 * i].eval(x, t);
        for (int j = 0; j < 3; ++j) CHECK(c.q[3 * i + j].eval(x, t) == doctest::Approx(c.q[3 * j + i].eval(x, t)));
      }
      CHECK(std::fabs(tr) <= 1e-12);
      if (tag != BoundaryTag::Wall) continue;
      // u vanishes on every wall; Q and p have zero normal slope there
      for (int a = 0; a < 3; ++a)
        for (double side : {0.0, g.length(a)}) {
          auto xw = x;
          xw[a] = side;
          std::array<int, 3> m{0, 0, 0};
          m[a] = 1;
          for (int i = 0; i < 3; ++i) CHECK(std::fabs(c.u[i].eval(xw, t)) <= 1e-12);
          for (int k = 0; k < 9; ++k) CHECK(std::fabs(c.q[k].eval(xw, t, m)) <= 1e-12);
          CHECK(std::fabs(c.p.eval(xw, t, m)) <= 1e-12);
        }
    }
  }
}

TEST_CASE("forcing examples") {
  const GridSpec g = box(8, BoundaryTag::Wall, 8);
  const ModelParams p{0.4, 1.3, 0.7, -0.2, 0.5, 1.1};
  SUBCASE("zero case needs no forcing") {
    const ManufacturedCase z = ManufacturedCase::zero();
    for (const auto& v : all_variants()) {
      const PointForcing f = continuous_forcing_at(z, p, v, {0.3, 0.2, 0.1}, 0.4);
      CHECK(max_abs_diff(f.g_q, Mat3d::zero()) == 0.0);
      for (double x : f.g_u) CHECK(x == 0.0);
      const Forcing d = build_forcing(z, g, p, v, ForcingKind::Discrete);
      CHECK(max_abs(d.q(0.0, 1e-3)) == 0.0);
      CHECK(max_abs(d.u(0.0, 1e-3)) == 0.0);
    }
  }
  SUBCASE("steady cosine with a cubic potential only") {
    const ModelParams pc{0.4, 1.3, 0.7, 0.0, 0.0, 1.1};
    const Mat3d e = Mat3d::diag(0.5, -0.2, -0.3) + 0.1 * (Mat3d::unit(0, 1) + Mat3d::unit(1, 0));
    const ManufacturedCase c = ManufacturedCase::steady_cosine(g, e);
    std::mt19937_64 rng(73);
    for (int rep = 0; rep < 10; ++rep) {
      const auto x = random_point(rng, g);
      const double cx = std::cos(pi * x[0] / g.lx);
      const Mat3d q = cx * e;
      const Mat3d expect = pc.gamma * (pc.epsilon * (pi / g.lx) * (pi / g.lx) * q + pc.c * frobenius_sq(q) * q);
      const PointForcing f = continuous_forcing_at(c, pc, VariantConfig{}, x, 0.5);
      CHECK(max_abs_diff(f.g_q, expect) <= 1e-12);
    }
  }
}

TEST_CASE("discrete forcing reproduces the manufactured state at any resolution") {
  const ModelParams p = mms_params();
  for (auto tag : {BoundaryTag::Periodic, BoundaryTag::Wall})
    for (int n : {8, 12}) {
      const GridSpec g = box(n, tag, n);
      for (const auto& v : all_variants()) {
        const MmsRun r = run_mms(ManufacturedCase::standard(g), g, p, v, ForcingKind::Discrete, 2e-3, 3);
        CHECK(r.max_dev <= 1e-9);
      }
    }
}

TEST_CASE("discrete ladder: errors at round-off, no order") {
  const GridSpec base = box(8, BoundaryTag::Wall);
  const ConvergenceTable t = convergence_study(mms_params(), VariantConfig{}, Ladder::discrete(base));
  CHECK(t.runs.size() >= 3);
  for (const auto& r : t.runs) CHECK(r.max_dev <= 1e-9);
  CHECK(std::isnan(t.order_u));
  std::ostringstream os;
  print_table(os, t);
  CHECK(os.str().find("N/A") != std::string::npos);
}

TEST_CASE("continuous forcing: second order in space on the walled box") {
  VariantConfig v;
  v.potential = PotentialKind::FF;
  v.stretching = Stretching::FullGradient;
  const ConvergenceTable t = convergence_study(mms_params(), v, Ladder::spatial(box(16, BoundaryTag::Wall)));
  CHECK(t.order_u == doctest::Approx(2.0).epsilon(0.1));
  CHECK(t.order_q == doctest::Approx(2.0).epsilon(0.1));
  std::ostringstream csv;
  write_table_csv(csv, t);
  const std::string text = csv.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}

TEST_CASE("fitted order recovers a power law") {
  std::vector<double> x{0.1, 0.05, 0.025, 0.0125}, y;
  for (double h : x) y.push_back(3.0 * std::pow(h, 1.7));
  CHECK(fitted_order(x, y) == doctest::Approx(1.7).epsilon(1e-12));
}
