#pragma once

// Per-step energy ledger, constraint monitors, spatial Lp norms and the
// running Bochner-norm accumulators behind the regularity-criterion report.

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "qtensor/constitutive.hpp"
#include "qtensor/fields.hpp"
#include "qtensor/solver.hpp"

namespace qtensor {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Midpoint-rule (sum |f|^p h^3)^(1/p); p = inf gives max |f|.  |f| is the
/// pointwise Euclidean/Frobenius magnitude.  Throws std::invalid_argument
/// for p < 1.
double lp_norm_of_magnitude(const ScalarField& mag, double p);

template <int N>
double lp_norm(const Field<N>& f, double p) {
  return lp_norm_of_magnitude(magnitude(f), p);
}

struct ConstraintDrifts {
  double trace_drift = 0.0;  // max |tr Q|
  double sym_drift = 0.0;    // max |Q - Q^t|_F
  double sup_q = 0.0;        // max |Q|_F
};

ConstraintDrifts constraint_drifts(const TensorField& q);

struct DiagnosticsRecord {
  double t = 0.0;
  double e_kinetic = 0.0;
  double e_elastic = 0.0;
  double e_bulk = 0.0;
  double dissipation_visc = 0.0;
  double dissipation_relax = 0.0;
  double sup_Q = 0.0;
  double trace_drift = 0.0;
  double sym_drift = 0.0;
  double grad_Q_L3 = 0.0;
  double div_u_L2 = 0.0;

  double energy() const { return e_kinetic + e_elastic + e_bulk; }
  double dissipation() const { return dissipation_visc + dissipation_relax; }
};

/// Column names of DiagnosticsRecord, in CSV order.
const std::vector<std::string>& record_columns();
std::vector<double> record_values(const DiagnosticsRecord& r);

/// Gradient energies use the face-difference form of ||grad f||^2, which
/// equals -<f, Lap f> for the solver's own Laplacian.  e_bulk may be
/// negative when a < 0 or b != 0.
DiagnosticsRecord energy_ledger(const SimState& s, const ModelParams& p, const VariantConfig& v = {});

/// |[E1 - E0]/dt + (D0 + D1)/2| / max((D0 + D1)/2, floor).  A negative
/// floor selects 1e-14 * max(|E0|, |E1|) / dt (plus a tiny absolute floor).
double energy_residual(const DiagnosticsRecord& r0, const DiagnosticsRecord& r1, double dt, double floor = -1.0);

/// max(|Q0|_inf, sqrt((|a| + 2|b| |Q0|_inf + 1) / c)); a stand-in bound for
/// the maximum principle, not a sharp constant.
double max_principle_bound(const TensorField& q0, const ModelParams& p);

// ---------------------------------------------------------------------------
// Mixed norms

/// 2q / (2q - 3); infinite at q = 3/2.
double conjugate_exponent(double q);
/// 2p / (p - 3); infinite at p = 3, 2 at p = inf.
double serrin_exponent(double p);
/// min(q, 2q / (2q - 3))
double gamma_exponent(double q);

/// "2.5", "3", "inf"
std::string format_exponent(double x);
double parse_exponent(const std::string& s);

/// Running integral of ||field(t)||_q^r dt by the trapezoid rule, or the
/// running max when r is infinite.
class MixedNormAccumulator {
 public:
  MixedNormAccumulator() = default;
  MixedNormAccumulator(std::string label, double q, double r);

  /// Adds a sample.  Throws std::invalid_argument if t does not advance.
  void accumulate(double norm, double t);

  /// integral^(1/r), or the max for r = inf; 0 before any interval.
  double report() const;

  const std::string& label() const { return label_; }
  double q() const { return q_; }
  double r() const { return r_; }
  double integral() const { return integral_; }
  std::int64_t samples() const { return samples_; }
  double t_first() const { return t_first_; }
  double t_last() const { return t_last_; }
  /// "mixed_<label>_q<q>_r<r>"
  std::string column_name() const;

 private:
  std::string label_;
  double q_ = 2.0, r_ = 2.0;
  double integral_ = 0.0;
  double last_value_ = 0.0;  // ||.||^r at t_last (r finite)
  double t_first_ = 0.0, t_last_ = 0.0;
  std::int64_t samples_ = 0;
};

/// Accumulator key: (label, q, r).
using MixedKey = std::tuple<std::string, double, double>;

struct CriterionConfig {
  /// Spatial exponents for the grad u / Lap Q families (5/2 is always added).
  std::vector<double> q_list{1.5, 2.0, 2.5, 3.0};
  /// Spatial exponents for the Serrin-type u / grad Q family.
  std::vector<double> serrin_p{4.0, 6.0, kInf};
};

/// Every accumulator the report draws on, for the given exponent lists.
std::vector<MixedKey> required_accumulators(const CriterionConfig& cfg);

struct CriterionRow {
  std::string family;  // e.g. "uniqueness:gradu"
  std::string label;
  double q = 0.0, r = 0.0;
  double q_min = 0.0, q_max = 0.0;
  bool in_range = false;
  bool available = false;  // accumulator present
  double value = 0.0;
  bool finite = false;
};

struct GammaRow {
  double q = 0.0;
  double gamma = 0.0;
  CriterionRow lap_q;  // Lap Q in L^gamma L^gamma
  CriterionRow dt_q;   // dQ/dt in L^gamma L^gamma
};

struct CriterionReport {
  std::vector<CriterionRow> rows;
  CriterionRow grad_q_linf_l3;  // bounds on grad Q in L^inf L^3 and L^3 L^9
  CriterionRow grad_q_l3_l9;
  std::vector<GammaRow> gamma_rows;
  double t_first = 0.0, t_last = 0.0;
};

CriterionReport criterion_report(const std::map<MixedKey, MixedNormAccumulator>& accs, const CriterionConfig& cfg);
void print_report(std::ostream& os, const CriterionReport& r);

// ---------------------------------------------------------------------------
// Per-run monitor

/// Spatial norm of the named field for the current state ("gradu", "lapq",
/// "gradq", "u"; "dtq" needs the previous Q and dt).
struct FieldNorms {
  explicit FieldNorms(const SimState& s, const TensorField* q_prev = nullptr, double dt = 0.0);
  double norm(const std::string& label, double q) const;

 private:
  ScalarField grad_u_, lap_q_, grad_q_, u_;
  std::optional<ScalarField> dt_q_;
};

/// Observes a run step by step: records, energy residuals and accumulators.
class RunMonitor {
 public:
  RunMonitor(const ModelParams& p, const VariantConfig& v, const CriterionConfig& cfg);

  /// Call once with the initial state, then after every step with the dt
  /// that produced it.  Returns the new record.
  const DiagnosticsRecord& observe(const SimState& s, double dt = 0.0);

  const std::vector<DiagnosticsRecord>& records() const { return records_; }
  const std::vector<double>& residuals() const { return residuals_; }
  double max_residual() const;
  const std::map<MixedKey, MixedNormAccumulator>& accumulators() const { return accs_; }
  /// Instantaneous spatial norm of each accumulator at the last observation,
  /// in `accumulators()` order (NaN where not yet defined, e.g. dtq at t0).
  const std::vector<double>& last_norms() const { return last_norms_; }
  std::vector<std::string> mixed_columns() const;
  CriterionReport report() const { return criterion_report(accs_, cfg_); }

 private:
  ModelParams params_;
  VariantConfig variants_;
  CriterionConfig cfg_;
  std::vector<DiagnosticsRecord> records_;
  std::vector<double> residuals_;
  std::map<MixedKey, MixedNormAccumulator> accs_;
  std::vector<double> last_norms_;
  std::optional<TensorField> q_prev_;
};

// ---------------------------------------------------------------------------
// CSV

/// Comment lines ("# ..."), the header row, then one row per call.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const std::vector<std::string>& comments, std::vector<std::string> mixed_columns);
  void write_row(const DiagnosticsRecord& r, const std::vector<double>& mixed);

 private:
  std::ostream& os_;
  std::size_t n_mixed_;
};

struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Index of a column, or -1.
  int find(const std::string& name) const;
};

/// Throws FormatError on a missing header or a ragged / non-numeric row.
CsvTable read_csv(std::istream& is);

/// Rebuilds accumulators from the logged "mixed_*" columns.  Throws
/// FormatError if a grad u column for some q in cfg.q_list is missing.
std::map<MixedKey, MixedNormAccumulator> accumulators_from_csv(const CsvTable& table, const CriterionConfig& cfg);

/// "%.17g"
std::string format_double(double x);

}  // namespace qtensor
