// qtensor: simulate / verify / report.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qtensor/checks.hpp"
#include "qtensor/config.hpp"
#include "qtensor/diagnostics.hpp"
#include "qtensor/errors.hpp"
#include "qtensor/parallel.hpp"
#include "qtensor/simulate.hpp"

namespace {

using namespace qtensor;

constexpr int kExitFailure = 1;  // run or check failed
constexpr int kExitUsage = 2;    // bad config, CSV or arguments

std::vector<double> parse_exponent_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(parse_exponent(item.substr(b, item.find_last_not_of(" \t") - b + 1)));
  }
  return out;
}

void apply_threads(std::optional<unsigned> flag) {
  if (flag) {
    parallel::set_num_threads(*flag);
    return;
  }
  if (const char* env = std::getenv("QTS_THREADS")) {
    try {
      parallel::set_num_threads(static_cast<unsigned>(std::stoul(env)));
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring QTS_THREADS='" << env << "'\n";
    }
  }
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, std::optional<std::uint64_t> seed) {
  RunConfig cfg = load_config(config_path);
  if (seed) cfg.ic.seed = *seed;
  const SimulateResult r = simulate(cfg, out_dir);
  std::cout << "steps " << r.steps << ", t = " << r.final_state.t << ", max energy residual "
            << r.max_residual << "\n"
            << "csv: " << r.csv.string() << "\n"
            << "final snapshot: " << r.snapshots.back().string() << "\n\n";
  print_report(std::cout, r.report);
  return 0;
}

struct VerifyArgs {
  std::string suite;
  std::string config;
  std::string potential, stretching;
  int steps = 200;
  double dt = 1e-4;
  std::string forcing = "discrete";
  int n = 16;
  bool slab = false;
  std::string csv;
};

int cmd_verify(const VerifyArgs& a) {
  std::vector<CheckResult> checks;
  if (a.suite == "invariants") {
    RunConfig cfg = a.config.empty() ? desk_config() : load_config(a.config);
    if (!a.potential.empty()) cfg.variants.potential = potential_from_string(a.potential);
    if (!a.stretching.empty()) cfg.variants.stretching = stretching_from_string(a.stretching);
    checks = invariant_suite(cfg, a.steps, a.dt);
  } else {
    MmsSuiteOptions o;
    o.forcing = forcing_kind_from_string(a.forcing);
    o.n = a.n;
    o.three_d = !a.slab;
    o.tables = &std::cout;
    std::ofstream csv;
    if (!a.csv.empty()) {
      csv.open(a.csv);
      if (!csv) throw FormatError("cannot write " + a.csv);
      o.csv = &csv;
    }
    checks = mms_suite(o);
  }
  for (const auto& c : checks) print_check(std::cout, c);
  const bool ok = all_passed(checks);
  std::cout << (ok ? "all checks passed" : "some checks FAILED") << "\n";
  return ok ? 0 : kExitFailure;
}

int cmd_report(const std::string& csv_path, const std::string& q_list, const std::string& serrin_p) {
  std::ifstream is(csv_path);
  if (!is) throw FormatError("csv not found: " + csv_path);
  CriterionConfig cfg;
  if (!q_list.empty()) cfg.q_list = parse_exponent_list(q_list);
  if (!serrin_p.empty()) cfg.serrin_p = parse_exponent_list(serrin_p);
  const CsvTable table = read_csv(is);
  print_report(std::cout, criterion_report(accumulators_from_csv(table, cfg), cfg));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Q-tensor / Navier-Stokes simulator with regularity-criterion diagnostics"};
  app.require_subcommand(1);
  app.fallthrough();
  std::optional<unsigned> threads;
  app.add_option("--threads", threads, "worker threads (default: QTS_THREADS, else all cores)");

  auto* sim = app.add_subcommand("simulate", "run a configuration, writing CSV diagnostics and snapshots");
  std::string config_path, out_dir = ".";
  std::optional<std::uint64_t> seed;
  sim->add_option("--config", config_path, "run configuration")->required();
  sim->add_option("--out", out_dir, "output directory");
  sim->add_option("--seed", seed, "override ic.seed");

  auto* ver = app.add_subcommand("verify", "run the mms or invariants suite");
  VerifyArgs va;
  ver->add_option("suite", va.suite, "mms | invariants")->required()->check(CLI::IsMember({"mms", "invariants"}));
  ver->add_option("--config", va.config, "invariants: base configuration (default: built-in desk run)");
  ver->add_option("--potential", va.potential, "invariants: FF | FZ | M1");
  ver->add_option("--stretching", va.stretching, "invariants: full-gradient | corotational");
  ver->add_option("--steps", va.steps, "invariants: steps")->check(CLI::PositiveNumber);
  ver->add_option("--dt", va.dt, "invariants: fixed step")->check(CLI::PositiveNumber);
  ver->add_option("--forcing", va.forcing, "mms: discrete | continuous");
  ver->add_option("--n", va.n, "mms discrete: cells per axis")->check(CLI::Range(4, 256));
  ver->add_flag("--slab", va.slab, "mms discrete: n x n x 1 instead of n^3");
  ver->add_option("--csv", va.csv, "mms: write convergence tables as CSV");

  auto* rep = app.add_subcommand("report", "recompute the criterion report from a diagnostics CSV");
  std::string csv_path, q_list, serrin_p;
  rep->add_option("csv", csv_path, "diagnostics CSV")->required();
  rep->add_option("--q-list", q_list, "comma-separated q exponents, fractions allowed (5/2 is always added)");
  rep->add_option("--serrin-p", serrin_p, "comma-separated p exponents (inf allowed)");

  CLI11_PARSE(app, argc, argv);
  apply_threads(threads);

  try {
    if (*sim) return cmd_simulate(config_path, out_dir, seed);
    if (*ver) return cmd_verify(va);
    if (*rep) return cmd_report(csv_path, q_list, serrin_p);
  } catch (const ValidationError& e) {
    std::cerr << "error: invalid configuration\n";
    for (const auto& v : e.violations()) std::cerr << "  " << v << "\n";
    return kExitUsage;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalBlowup& e) {
    std::cerr << "error: numerical blow-up: " << e.what() << "\n";
    return kExitFailure;
  } catch (const SolverError& e) {
    std::cerr << "error: linear solver: " << e.what() << "\n";
    return kExitFailure;
  } catch (const StepRejected& e) {
    std::cerr << "error: " << e.what() << " (suggested dt " << e.suggested_dt() << ")\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return 0;
}
