#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "qtensor/checks.hpp"
#include "qtensor/diagnostics.hpp"
#include "qtensor/presets.hpp"
#include "qtensor/snapshot.hpp"
#include "qtensor/solver.hpp"

using namespace qtensor;

namespace {

StepControl fixed(double dt) {
  StepControl c;
  c.dt = dt;
  c.cfl_target = 1.0;
  c.adaptive = false;
  return c;
}

double l2(const ScalarField& s) { return std::sqrt(inner(s, s)); }

double state_distance(const SimState& a, const SimState& b) {
  return std::sqrt(inner(a.u - b.u, a.u - b.u) + inner(a.q - b.q, a.q - b.q));
}

SimState run_fixed(const RunConfig& cfg, double dt, int steps) {
  SimState s = initial_state(cfg);
  Stepper st(cfg.grid, cfg.params, cfg.variants, cfg.step_options());
  for (int k = 0; k < steps; ++k) s = st.step(s, fixed(dt));
  return s;
}

}  // namespace

TEST_CASE("zero state is a fixed point") {
  RunConfig cfg = desk_config(16);
  for (const auto& v : all_variants()) {
    const SimState z = SimState::zero(cfg.grid);
    RunHooks hooks;
    int calls = 0;
    hooks.on_step = [&](const SimState& s, double) {
      ++calls;
      CHECK(max_abs(s.u) == 0.0);
      CHECK(max_abs(s.q) == 0.0);
      CHECK(max_abs(s.p) == 0.0);
    };
    hooks.max_steps = 100;
    const SimState end = run(z, cfg.params, v, fixed(1e-4), 1.0, hooks);
    CHECK(calls == 100);
    CHECK(end.step_index == 100);
  }
}

TEST_CASE("Q = 0 reduces to Navier-Stokes") {
  for (auto tag : {BoundaryTag::Periodic, BoundaryTag::Wall}) {
    RunConfig cfg = desk_config(24);
    cfg.grid = GridSpec::make(24, 24, 1, 1, 1, 1, {tag, tag, BoundaryTag::Periodic});
    for (const auto& v : all_variants()) {
      cfg.variants = v;
      const ReductionResult r = q_zero_reduction(cfg, 30, 1e-4);
      CHECK(r.max_rel_u_diff <= 1e-12);
      CHECK(r.max_sup_q == 0.0);
    }
  }
}

TEST_CASE("spatially constant Q follows the potential ODE") {
  const GridSpec g = GridSpec::make(8, 8, 8, 1, 1, 1, {BoundaryTag::Wall, BoundaryTag::Periodic, BoundaryTag::Wall});
  const ModelParams p{1.0, 2.0, 1.0, -0.5, 0.7, 1.3};
  const Mat3d q0 = Mat3d::diag(0.4, -0.1, -0.3) + 0.2 * (Mat3d::unit(0, 1) + Mat3d::unit(1, 0));
  for (const auto& v : all_variants()) {
    auto rhs = [&](const Mat3d& q) { return -p.gamma * potential_f(q, p, v); };
    // reference: RK4 with a much finer step
    auto reference = [&](double t) {
      Mat3d q = q0;
      const int n = 2000;
      const double h = t / n;
      for (int k = 0; k < n; ++k) {
        const Mat3d k1 = rhs(q), k2 = rhs(q + (h / 2) * k1), k3 = rhs(q + (h / 2) * k2), k4 = rhs(q + h * k3);
        q = q + (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      return q;
    };
    double prev = 0.0;
    for (double dt : {1e-2, 5e-3, 2.5e-3}) {
      SimState s = SimState::zero(g);
      s.q = constant_tensor(g, q0);
      const SimState n1 = step(s, p, v, fixed(dt));
      CHECK(max_abs(n1.u) <= 1e-14);
      // explicit Euler on dQ/dt = -gamma f(Q)
      const Mat3d euler = q0 + dt * rhs(q0);
      CHECK(max_abs_diff(n1.q.tensor_at(123), euler) <= 1e-14);
      const double err = max_abs_diff(n1.q.tensor_at(0), reference(dt));
      if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.1));
      prev = err;
    }
  }
}

TEST_CASE("compute_dt examples") {
  const GridSpec g = GridSpec::make(64, 64, 1, 1, 1, 1, {BoundaryTag::Periodic, BoundaryTag::Periodic, BoundaryTag::Periodic});
  const ModelParams p{1, 1, 1, 0, 0, 1};
  StepControl c;
  c.dt_max = 1e-2;
  c.cfl_target = 0.5;
  SimState s = SimState::zero(g);
  CHECK(compute_dt(s, p, c) == c.dt_max);

  c.dt_max = 1.0;
  for (std::size_t n = 0; n < g.cells(); ++n) s.u(0, n) = n == 5 ? 1.0 : 0.25;
  CHECK(compute_dt(s, p, c) == doctest::Approx(1.0 / 128).epsilon(1e-12));
  c.dt_max = 1e-3;
  CHECK(compute_dt(s, p, c) == 1e-3);

  SimState big = SimState::zero(g);
  big.q = constant_tensor(g, 10.0 * Mat3d::identity());
  c.dt_max = 1.0;
  const double d1 = compute_dt(big, p, c);
  ModelParams half = p;
  half.c = 0.5;
  const double d2 = compute_dt(big, half, c);
  CHECK(d1 < 1e-3);
  CHECK(d2 / d1 == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("steps violating the CFL target are rejected") {
  const GridSpec g = GridSpec::make(16, 16, 1, 1, 1, 1, {BoundaryTag::Periodic, BoundaryTag::Periodic, BoundaryTag::Periodic});
  SimState s = SimState::zero(g);
  s.u = vortex_velocity(g, 2.0);
  StepControl c = fixed(0.1);
  c.cfl_target = 0.5;
  try {
    step(s, ModelParams{}, {}, c);
    FAIL("expected StepRejected");
  } catch (const StepRejected& e) {
    CHECK(e.suggested_dt() > 0.0);
    CHECK(e.suggested_dt() < 0.1);
  }
}

TEST_CASE("run bookkeeping") {
  RunConfig cfg = desk_config(16);
  const SimState s0 = initial_state(cfg);
  SUBCASE("t_end equal to the start time takes no steps") {
    const SimState r = run(s0, cfg.params, cfg.variants, fixed(1e-4), s0.t);
    CHECK(r.step_index == 0);
    CHECK(r.q == s0.q);
    CHECK(r.u == s0.u);
  }
  SUBCASE("last step lands on t_end") {
    int steps = 0;
    RunHooks hooks;
    hooks.on_step = [&](const SimState&, double) { ++steps; };
    const SimState r = run(s0, cfg.params, cfg.variants, fixed(3e-4), 1e-3, hooks);
    CHECK(steps == 4);
    CHECK(r.t == doctest::Approx(1e-3).epsilon(1e-14));
  }
  SUBCASE("blow-up dumps the last good state") {
    const auto dir = std::filesystem::temp_directory_path() / "qts_unit_blowup";
    std::filesystem::create_directories(dir);
    const auto snap = dir / "blowup.qts";
    std::filesystem::remove(snap);
    Forcing bad;
    bad.q = [&](double t, double) {
      TensorField f(cfg.grid);
      if (t > 2.5e-4) f(0, 3) = std::nan("");
      return f;
    };
    RunHooks hooks;
    hooks.forcing = &bad;
    hooks.blowup_snapshot = snap;
    CHECK_THROWS_AS(run(s0, cfg.params, cfg.variants, fixed(1e-4), 1e-2, hooks), NumericalBlowup);
    REQUIRE(std::filesystem::exists(snap));
    const Snapshot last = read_snapshot(snap, cfg.grid.bc);
    CHECK(last.q.all_finite());
    CHECK(last.t == doctest::Approx(3e-4));
    std::filesystem::remove_all(dir);
  }
}

TEST_CASE("property: every step leaves u discretely solenoidal") {
  for (auto tag : {BoundaryTag::Periodic, BoundaryTag::Wall}) {
    RunConfig cfg = desk_config(24);
    cfg.grid = GridSpec::make(24, 24, 1, 1, 1, 1, {tag, tag, BoundaryTag::Periodic});
    cfg.ic.preset = "random-smooth";
    cfg.ic.u_amplitude = 0.5;
    cfg.variants.stretching = Stretching::FullGradient;
    SimState s = initial_state(cfg);
    Stepper st(cfg.grid, cfg.params, cfg.variants);
    const double h = cfg.grid.h_min();
    for (int k = 0; k < 20; ++k) {
      s = st.step(s, fixed(1e-4));
      const double ratio = l2(divergence(s.u)) / (std::sqrt(inner(s.u, s.u)) / h + 1e-300);
      CHECK(ratio <= 1e-8);
    }
  }
}

TEST_CASE("property: trace and symmetry preservation on a walled box") {
  RunConfig cfg = desk_config(24);
  cfg.grid = GridSpec::make(24, 24, 1, 1, 1, 1, {BoundaryTag::Wall, BoundaryTag::Wall, BoundaryTag::Periodic});
  cfg.ic.preset = "random-smooth";
  cfg.ic.u_amplitude = 0.3;
  for (auto pot : {PotentialKind::FZ, PotentialKind::M1}) {
    cfg.variants.potential = pot;
    cfg.variants.stretching = Stretching::Corotational;
    const DeskRun r = desk_run(cfg, 50, 1e-4);
    CHECK(r.max_trace_ratio <= 1e-10);
    CHECK(r.max_sym_ratio <= 1e-10);
  }
}

TEST_CASE("property: Q = 0 stays exactly zero") {
  RunConfig cfg = desk_config(16);
  cfg.ic = ICConfig{};
  cfg.ic.preset = "taylor-green-q0";
  for (const auto& v : all_variants()) {
    cfg.variants = v;
    SimState s = initial_state(cfg);
    Stepper st(cfg.grid, cfg.params, v);
    for (int k = 0; k < 10; ++k) {
      s = st.step(s, fixed(1e-4));
      CHECK(max_abs(s.q) == 0.0);
    }
  }
}

TEST_CASE("property: first-order temporal self-convergence") {
  RunConfig cfg = desk_config(32);
  const double t_end = 0.02;
  const SimState a = run_fixed(cfg, 2e-4, 100), b = run_fixed(cfg, 1e-4, 200), c = run_fixed(cfg, 5e-5, 400);
  CHECK(a.t == doctest::Approx(t_end));
  const double ratio = state_distance(a, b) / state_distance(b, c);
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("implicit viscosity is stable beyond the explicit limit") {
  RunConfig cfg = desk_config(32);
  cfg.params.nu = 5.0;
  const double h = cfg.grid.h_min();
  const double dt = 4.0 * h * h / (4.0 * cfg.params.nu);  // 4x the explicit limit
  SimState s = initial_state(cfg);
  Stepper st(cfg.grid, cfg.params, cfg.variants);
  StepControl c = fixed(dt);
  c.viscous_implicit = true;
  const double e0 = std::sqrt(inner(s.u, s.u));
  for (int k = 0; k < 50; ++k) s = st.step(s, c);
  CHECK(s.all_finite());
  CHECK(std::sqrt(inner(s.u, s.u)) < e0);
}

TEST_CASE("results do not depend on the thread count") {
  RunConfig cfg = desk_config(96);
  parallel::set_num_threads(1);
  const SimState a = run_fixed(cfg, 2e-5, 3);
  parallel::set_num_threads(4);
  const SimState b = run_fixed(cfg, 2e-5, 3);
  parallel::set_num_threads(0);
  CHECK(a.u == b.u);
  CHECK(a.q == b.q);
  CHECK(a.p == b.p);
}

TEST_CASE("energy decays on the documented smooth seed") {
  // random-smooth, seed 2024, 64 x 64 x 1 periodic slab
  RunConfig cfg = desk_config(64);
  cfg.ic = ICConfig{};
  cfg.ic.preset = "random-smooth";
  cfg.ic.amplitude = 0.5;
  cfg.ic.u_amplitude = 0.1;
  cfg.ic.seed = 2024;
  const double dt = 5e-5;
  SimState s = initial_state(cfg);
  RunMonitor mon(cfg.params, cfg.variants, cfg.diagnostics.criteria);
  mon.observe(s);
  Stepper st(cfg.grid, cfg.params, cfg.variants, cfg.step_options());
  for (int k = 0; k < 200; ++k) {
    s = st.step(s, fixed(dt));
    mon.observe(s, dt);
  }
  const auto& rec = mon.records();
  for (std::size_t k = 1; k < rec.size(); ++k) {
    // E may rise only by what the 5% residual tolerance allows
    const double slack = 0.05 * dt * 0.5 * (rec[k - 1].dissipation() + rec[k].dissipation());
    CHECK(rec[k].energy() <= rec[k - 1].energy() + slack);
  }
  CHECK(mon.max_residual() <= 0.05);
  CHECK(rec.back().energy() < rec.front().energy());
}
