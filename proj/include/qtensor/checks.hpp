#pragma once

// Pass/fail suites shared by `qtensor verify` and the acceptance binary.

#include <iosfwd>
#include <string>
#include <vector>

#include "qtensor/config.hpp"
#include "qtensor/verification.hpp"

namespace qtensor {

struct CheckResult {
  std::string name;
  bool passed = false;
  /// Informational checks are reported but never fail a suite.
  bool asserted = true;
  std::string detail;
};

/// "PASS <name>: <detail>", "FAIL ..." or "INFO ..." for unasserted checks.
void print_check(std::ostream& os, const CheckResult& c);
bool all_passed(const std::vector<CheckResult>& checks);

/// Smooth desk run: n x n periodic slab on the unit square, uniaxial-cosine Q
/// (amplitude 0.5, director (1, 1, 0)) and a vortex of max speed 0.1;
/// nu = gamma = epsilon = 1, a = -0.2, b = 0.5, c = 1.
RunConfig desk_config(int n = 48);

struct DeskRun {
  std::vector<DiagnosticsRecord> records;  // initial state first
  std::vector<double> residuals;           // one per step
  double max_residual = 0.0;
  double max_trace_ratio = 0.0;  // max_t |tr Q|_inf / max_t |Q|_inf
  double max_sym_ratio = 0.0;
  double seconds = 0.0;
};

/// `steps` fixed steps of size dt from initial_state(cfg), observed every step.
DeskRun desk_run(const RunConfig& cfg, int steps, double dt);

/// Q == 0 reduction: the coupled and the stress-free runs from
/// (taylor-green u, Q = 0) are compared step by step.
struct ReductionResult {
  double max_rel_u_diff = 0.0;
  double max_sup_q = 0.0;
};
ReductionResult q_zero_reduction(const RunConfig& cfg, int steps, double dt);

/// Trace, symmetry, energy residual and Q == 0 reduction on a desk run.
/// Trace preservation is asserted unless the potential is FF; symmetry and
/// the energy residual only for corotational stretching, where the
/// stretching work and the commutator stress cancel.
std::vector<CheckResult> invariant_suite(const RunConfig& cfg, int steps = 200, double dt = 1e-4);

struct MmsSuiteOptions {
  ForcingKind forcing = ForcingKind::Discrete;
  /// Discrete flavour: n^3 box (n^2 slab if !three_d), `steps` steps of dt.
  int n = 16;
  bool three_d = true;
  int steps = 5;
  double dt = 2e-3;
  /// Continuous flavour: convergence tables are echoed here when set.
  std::ostream* tables = nullptr;
  std::ostream* csv = nullptr;
};

/// Every variant combination on the periodic and the walled box.
/// Discrete: max deviation <= 10x the linear-solver tolerance.
/// Continuous: spatial order 2.0 +- 0.2 and temporal order 1.0 +- 0.2 for
/// u and Q.
std::vector<CheckResult> mms_suite(const MmsSuiteOptions& opts = {});

/// The six potential x stretching combinations.
std::vector<VariantConfig> all_variants();

}  // namespace qtensor
