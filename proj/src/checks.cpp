#include "qtensor/checks.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "qtensor/linear_solvers.hpp"
#include "qtensor/presets.hpp"

namespace qtensor {

namespace {

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::string variant_name(const VariantConfig& v) { return to_string(v.potential) + "+" + to_string(v.stretching); }

StepControl fixed_step(double dt, bool viscous_implicit) {
  StepControl c;
  c.dt = dt;
  c.cfl_target = 1.0;
  c.viscous_implicit = viscous_implicit;
  c.adaptive = false;
  return c;
}

}  // namespace

void print_check(std::ostream& os, const CheckResult& c) {
  const char* tag = !c.asserted ? "INFO" : c.passed ? "PASS" : "FAIL";
  os << tag << " " << c.name;
  if (!c.detail.empty()) os << ": " << c.detail;
  os << "\n";
}

bool all_passed(const std::vector<CheckResult>& checks) {
  for (const auto& c : checks)
    if (c.asserted && !c.passed) return false;
  return true;
}

std::vector<VariantConfig> all_variants() {
  std::vector<VariantConfig> out;
  for (auto pot : {PotentialKind::FF, PotentialKind::FZ, PotentialKind::M1})
    for (auto str : {Stretching::FullGradient, Stretching::Corotational}) {
      VariantConfig v;
      v.potential = pot;
      v.stretching = str;
      out.push_back(v);
    }
  return out;
}

RunConfig desk_config(int n) {
  RunConfig c;
  c.grid = GridSpec::make(n, n, 1, 1.0, 1.0, 1.0, {BoundaryTag::Periodic, BoundaryTag::Periodic, BoundaryTag::Periodic});
  c.params = ModelParams{1.0, 1.0, 1.0, -0.2, 0.5, 1.0};
  c.ic.preset = "uniaxial-cosine";
  c.ic.amplitude = 0.5;
  c.ic.u_amplitude = 0.1;
  c.ic.director = {1.0, 1.0, 0.0};
  return c;
}

DeskRun desk_run(const RunConfig& cfg, int steps, double dt) {
  const auto t0 = std::chrono::steady_clock::now();
  SimState s = initial_state(cfg);
  RunMonitor mon(cfg.params, cfg.variants, cfg.diagnostics.criteria);
  mon.observe(s);
  Stepper st(cfg.grid, cfg.params, cfg.variants, cfg.step_options());
  const StepControl ctl = fixed_step(dt, cfg.time.viscous_implicit);
  for (int k = 0; k < steps; ++k) {
    s = st.step(s, ctl);
    if (!s.all_finite()) throw NumericalBlowup("desk run blew up at step " + std::to_string(k + 1));
    mon.observe(s, dt);
  }
  DeskRun r;
  r.records = mon.records();
  r.residuals = mon.residuals();
  r.max_residual = mon.max_residual();
  double sup = 0.0, tr = 0.0, sym = 0.0;
  for (const auto& rec : r.records) {
    sup = std::max(sup, rec.sup_Q);
    tr = std::max(tr, rec.trace_drift);
    sym = std::max(sym, rec.sym_drift);
  }
  r.max_trace_ratio = sup > 0.0 ? tr / sup : tr;
  r.max_sym_ratio = sup > 0.0 ? sym / sup : sym;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

ReductionResult q_zero_reduction(const RunConfig& cfg, int steps, double dt) {
  RunConfig c = cfg;
  c.ic = ICConfig{};
  c.ic.preset = "taylor-green-q0";
  c.ic.u_amplitude = cfg.ic.u_amplitude.value_or(0.0) > 0.0 ? *cfg.ic.u_amplitude : 1.0;
  const SimState s0 = initial_state(c);
  StepOptions coupled = c.step_options(), free = c.step_options();
  coupled.couple_flow = true;
  free.couple_flow = false;
  Stepper a(c.grid, c.params, c.variants, coupled), b(c.grid, c.params, c.variants, free);
  const StepControl ctl = fixed_step(dt, c.time.viscous_implicit);
  SimState sa = s0, sb = s0;
  ReductionResult r;
  for (int k = 0; k < steps; ++k) {
    sa = a.step(sa, ctl);
    sb = b.step(sb, ctl);
    const double scale = std::max(max_speed(sb.u), 1e-300);
    r.max_rel_u_diff = std::max(r.max_rel_u_diff, max_deviation(sa.u, sb.u) / scale);
    r.max_sup_q = std::max(r.max_sup_q, constraint_drifts(sa.q).sup_q);
  }
  return r;
}

std::vector<CheckResult> invariant_suite(const RunConfig& cfg, int steps, double dt) {
  const VariantConfig& v = cfg.variants;
  const std::string tag = " [" + variant_name(v) + "]";
  const DeskRun run = desk_run(cfg, steps, dt);
  std::vector<CheckResult> out;

  CheckResult tr{"trace preservation" + tag, run.max_trace_ratio <= 1e-10, v.potential != PotentialKind::FF,
                 fmt("max|tr Q| / max|Q| = %.3e (limit 1e-10)", run.max_trace_ratio)};
  if (!tr.asserted) tr.detail += "; FF does not preserve the trace, reported only";
  out.push_back(tr);

  CheckResult sym{"symmetry preservation" + tag, run.max_sym_ratio <= 1e-10,
                  v.stretching == Stretching::Corotational,
                  fmt("max|Q - Q^t| / max|Q| = %.3e (limit 1e-10)", run.max_sym_ratio)};
  if (!sym.asserted) sym.detail += "; full-gradient stretching is not symmetry preserving, reported only";
  out.push_back(sym);

  CheckResult en{"energy residual" + tag, run.max_residual <= 0.05, v.stretching == Stretching::Corotational,
                 fmt("max normalized residual = %.3e over %g steps of dt = %g (limit 0.05)", run.max_residual,
                     steps, dt)};
  if (!en.asserted) en.detail += "; the energy equality assumes corotational stretching, reported only";
  out.push_back(en);

  const ReductionResult red = q_zero_reduction(cfg, steps, dt);
  out.push_back({"Q = 0 reduction" + tag, red.max_rel_u_diff <= 1e-12 && red.max_sup_q == 0.0, true,
                 fmt("max relative u difference = %.3e (limit 1e-12), max|Q| = %g", red.max_rel_u_diff,
                     red.max_sup_q)});
  return out;
}

std::vector<CheckResult> mms_suite(const MmsSuiteOptions& opts) {
  std::vector<CheckResult> out;
  const ModelParams p = mms_params();
  bool csv_header = true;
  for (auto tag : {BoundaryTag::Periodic, BoundaryTag::Wall}) {
    const std::string box = tag == BoundaryTag::Periodic ? "periodic" : "walled";
    const BoundaryTag tz = opts.three_d ? tag : BoundaryTag::Periodic;
    for (const auto& v : all_variants()) {
      const std::string name = variant_name(v) + " " + box;
      if (opts.forcing == ForcingKind::Discrete) {
        const int nz = opts.three_d ? opts.n : 1;
        const GridSpec g = GridSpec::make(opts.n, opts.n, nz, 1.0, 1.0, 1.0, {tag, tag, tz});
        const MmsRun r = run_mms(ManufacturedCase::standard(g), g, p, v, ForcingKind::Discrete, opts.dt, opts.steps);
        const double limit = 10.0 * SolveOptions{}.tolerance;
        out.push_back({"mms discrete " + name, r.max_dev <= limit, true,
                       fmt("max deviation %.3e over %g steps (limit %.0e)", r.max_dev, opts.steps, limit)});
        continue;
      }
      const GridSpec base = GridSpec::make(16, 16, 1, 1.0, 1.0, 1.0, {tag, tag, BoundaryTag::Periodic});
      for (const Ladder& ladder : {Ladder::spatial(base), Ladder::temporal(base)}) {
        const ConvergenceTable t = convergence_study(p, v, ladder);
        if (opts.tables) print_table(*opts.tables, t);
        if (opts.csv) {
          write_table_csv(*opts.csv, t, csv_header);
          csv_header = false;
        }
        const bool spatial = ladder.kind == LadderKind::Spatial;
        const double target = spatial ? 2.0 : 1.0;
        const bool ok = std::fabs(t.order_u - target) <= 0.2 && std::fabs(t.order_q - target) <= 0.2;
        out.push_back({std::string("mms ") + (spatial ? "spatial" : "temporal") + " order " + name, ok, true,
                       fmt("u %.3f, Q %.3f (target %.1f +- 0.2)", t.order_u, t.order_q, target)});
      }
    }
  }
  return out;
}

}  // namespace qtensor
