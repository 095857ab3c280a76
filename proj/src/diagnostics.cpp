#include "qtensor/diagnostics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qtensor/errors.hpp"
#include "qtensor/operators.hpp"

namespace qtensor {

double lp_norm_of_magnitude(const ScalarField& mag, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: exponent must be >= 1");
  const auto v = mag.component(0);
  if (std::isinf(p)) return parallel::max(v.size(), [&](std::size_t n) { return std::fabs(v[n]); });
  const double vol = mag.grid().cell_volume();
  double s;
  if (p == 2.0)
    s = parallel::sum(v.size(), [&](std::size_t n) { return v[n] * v[n]; });
  else if (p == 1.0)
    s = parallel::sum(v.size(), [&](std::size_t n) { return std::fabs(v[n]); });
  else
    s = parallel::sum(v.size(), [&](std::size_t n) { return std::pow(std::fabs(v[n]), p); });
  return std::pow(s * vol, 1.0 / p);
}

ConstraintDrifts constraint_drifts(const TensorField& q) {
  ConstraintDrifts d;
  for (std::size_t n = 0; n < q.cells(); ++n) {
    const Mat3d m = q.tensor_at(n);
    d.trace_drift = std::max(d.trace_drift, std::fabs(trace(m)));
    d.sym_drift = std::max(d.sym_drift, std::sqrt(frobenius_sq(m - transpose(m))));
    d.sup_q = std::max(d.sup_q, std::sqrt(frobenius_sq(m)));
  }
  return d;
}

const std::vector<std::string>& record_columns() {
  static const std::vector<std::string> cols{"t",           "e_kinetic",   "e_elastic", "e_bulk",
                                             "dissipation_visc", "dissipation_relax", "sup_Q", "trace_drift",
                                             "sym_drift",   "grad_Q_L3",   "div_u_L2"};
  return cols;
}

std::vector<double> record_values(const DiagnosticsRecord& r) {
  return {r.t,     r.e_kinetic,   r.e_elastic, r.e_bulk,    r.dissipation_visc, r.dissipation_relax,
          r.sup_Q, r.trace_drift, r.sym_drift, r.grad_Q_L3, r.div_u_L2};
}

DiagnosticsRecord energy_ledger(const SimState& s, const ModelParams& p, const VariantConfig& v) {
  DiagnosticsRecord r;
  r.t = s.t;
  r.e_kinetic = 0.5 * inner(s.u, s.u);
  r.e_elastic = 0.5 * p.epsilon * dirichlet_energy(s.q, FieldRole::OrderTensor);
  const ScalarField f = bulk_F(s.q, p);
  r.e_bulk = s.grid().cell_volume() * parallel::sum(f.cells(), [&](std::size_t n) { return f(0, n); });
  r.dissipation_visc = p.nu * dirichlet_energy(s.u, FieldRole::Velocity);
  const TensorField h = molecular_field_H(s.q, p, v);
  r.dissipation_relax = p.gamma * inner(h, h);
  const ConstraintDrifts d = constraint_drifts(s.q);
  r.sup_Q = d.sup_q;
  r.trace_drift = d.trace_drift;
  r.sym_drift = d.sym_drift;
  r.grad_Q_L3 = lp_norm(gradient(s.q, FieldRole::OrderTensor), 3.0);
  r.div_u_L2 = lp_norm(divergence(s.u, FieldRole::Velocity), 2.0);
  return r;
}

double energy_residual(const DiagnosticsRecord& r0, const DiagnosticsRecord& r1, double dt, double floor) {
  if (!(dt > 0.0)) throw std::invalid_argument("energy_residual: dt must be positive");
  const double e0 = r0.energy(), e1 = r1.energy();
  const double d = 0.5 * (r0.dissipation() + r1.dissipation());
  const double res = (e1 - e0) / dt + d;
  if (floor < 0.0) floor = 1e-14 * std::max(std::fabs(e0), std::fabs(e1)) / dt + 1e-300;
  return std::fabs(res) / std::max(d, floor);
}

double max_principle_bound(const TensorField& q0, const ModelParams& p) {
  const double s = constraint_drifts(q0).sup_q;
  return std::max(s, std::sqrt((std::fabs(p.a) + 2.0 * std::fabs(p.b) * s + 1.0) / p.c));
}

// ---------------------------------------------------------------------------

double conjugate_exponent(double q) {
  if (q == 1.5) return kInf;
  return 2.0 * q / (2.0 * q - 3.0);
}

double serrin_exponent(double p) {
  if (std::isinf(p)) return 2.0;
  if (p == 3.0) return kInf;
  return 2.0 * p / (p - 3.0);
}

double gamma_exponent(double q) { return std::min(q, conjugate_exponent(q)); }

std::string format_exponent(double x) {
  if (std::isinf(x)) return "inf";
  // shortest text that parses back to the same double, so column names
  // written here map back onto the exact exponent pair
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_exponent(const std::string& s) {
  if (s == "inf" || s == "Inf" || s == "infinity") return kInf;
  // accept simple fractions such as 5/2
  const auto slash = s.find('/');
  std::size_t used = 0;
  try {
    if (slash != std::string::npos) {
      const double num = std::stod(s.substr(0, slash), &used);
      if (used != slash) throw std::invalid_argument("");
      const std::string den_s = s.substr(slash + 1);
      const double den = std::stod(den_s, &used);
      if (used != den_s.size() || den == 0.0) throw std::invalid_argument("");
      return num / den;
    }
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw FormatError("bad exponent '" + s + "'");
  }
}

MixedNormAccumulator::MixedNormAccumulator(std::string label, double q, double r)
    : label_(std::move(label)), q_(q), r_(r) {
  if (!(q >= 1.0)) throw std::invalid_argument("mixed norm: q must be >= 1");
  if (!(r >= 1.0)) throw std::invalid_argument("mixed norm: r must be >= 1");
}

void MixedNormAccumulator::accumulate(double norm, double t) {
  if (samples_ > 0 && !(t > t_last_))
    throw std::invalid_argument("mixed norm " + column_name() + ": time must increase");
  if (std::isinf(r_)) {
    integral_ = samples_ == 0 ? norm : std::max(integral_, norm);
  } else {
    const double v = std::pow(norm, r_);
    if (samples_ > 0) integral_ += 0.5 * (t - t_last_) * (v + last_value_);
    last_value_ = v;
  }
  if (samples_ == 0) t_first_ = t;
  t_last_ = t;
  ++samples_;
}

double MixedNormAccumulator::report() const {
  if (std::isinf(r_)) return integral_;
  return std::pow(integral_, 1.0 / r_);
}

std::string MixedNormAccumulator::column_name() const {
  return "mixed_" + label_ + "_q" + format_exponent(q_) + "_r" + format_exponent(r_);
}

namespace {

std::vector<double> with_five_halves(std::vector<double> qs) {
  if (std::find(qs.begin(), qs.end(), 2.5) == qs.end()) qs.push_back(2.5);
  std::sort(qs.begin(), qs.end());
  return qs;
}

}  // namespace

std::vector<MixedKey> required_accumulators(const CriterionConfig& cfg) {
  std::vector<MixedKey> keys;
  auto add = [&](const std::string& label, double q, double r) {
    MixedKey k{label, q, r};
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  };
  for (double q : with_five_halves(cfg.q_list)) {
    add("gradu", q, conjugate_exponent(q));
    add("lapq", q, conjugate_exponent(q));
  }
  for (double p : cfg.serrin_p) {
    add("u", p, serrin_exponent(p));
    add("gradq", p, serrin_exponent(p));
  }
  add("gradq", 3.0, kInf);
  add("gradq", 9.0, 3.0);
  for (double q : with_five_halves(cfg.q_list)) {
    const double g = gamma_exponent(q);
    add("lapq", g, g);
    add("dtq", g, g);
  }
  return keys;
}

namespace {

CriterionRow make_row(const std::map<MixedKey, MixedNormAccumulator>& accs, const std::string& family,
                      const std::string& label, double q, double r, double lo, double hi) {
  CriterionRow row;
  row.family = family;
  row.label = label;
  row.q = q;
  row.r = r;
  row.q_min = lo;
  row.q_max = hi;
  row.in_range = q >= lo && q <= hi;
  const auto it = accs.find(MixedKey{label, q, r});
  if (it != accs.end()) {
    row.available = true;
    row.value = it->second.report();
    row.finite = std::isfinite(row.value);
  }
  return row;
}

}  // namespace

CriterionReport criterion_report(const std::map<MixedKey, MixedNormAccumulator>& accs, const CriterionConfig& cfg) {
  CriterionReport rep;
  const auto qs = with_five_halves(cfg.q_list);
  for (double q : qs) rep.rows.push_back(make_row(accs, "uniqueness:gradu", "gradu", q, conjugate_exponent(q), 2, 3));
  for (double q : qs) rep.rows.push_back(make_row(accs, "uniqueness:lapq", "lapq", q, conjugate_exponent(q), 2, 3));
  for (double q : qs) rep.rows.push_back(make_row(accs, "weak-t:gradu", "gradu", q, conjugate_exponent(q), 1.5, 3));
  for (double q : qs) rep.rows.push_back(make_row(accs, "weak-t:lapq", "lapq", q, conjugate_exponent(q), 1.5, 3));
  for (double p : cfg.serrin_p) rep.rows.push_back(make_row(accs, "serrin:u", "u", p, serrin_exponent(p), 3, kInf));
  for (double p : cfg.serrin_p)
    rep.rows.push_back(make_row(accs, "serrin:gradq", "gradq", p, serrin_exponent(p), 3, kInf));
  rep.rows.push_back(make_row(accs, "critical:gradu", "gradu", 2.5, 2.5, 2.5, 2.5));
  rep.grad_q_linf_l3 = make_row(accs, "gradq-bound:gradq", "gradq", 3.0, kInf, 3, 3);
  rep.grad_q_l3_l9 = make_row(accs, "gradq-bound:gradq", "gradq", 9.0, 3.0, 9, 9);
  for (double q : qs) {
    GammaRow g;
    g.q = q;
    g.gamma = gamma_exponent(q);
    g.lap_q = make_row(accs, "max-regularity:lapq", "lapq", g.gamma, g.gamma, 1.5, 2.5);
    g.dt_q = make_row(accs, "max-regularity:dtq", "dtq", g.gamma, g.gamma, 1.5, 2.5);
    g.lap_q.in_range = g.dt_q.in_range = q >= 1.5 && q <= 3.0;
    rep.gamma_rows.push_back(g);
  }
  bool first = true;
  for (const auto& [k, a] : accs) {
    if (a.samples() == 0) continue;
    rep.t_first = first ? a.t_first() : std::min(rep.t_first, a.t_first());
    rep.t_last = first ? a.t_last() : std::max(rep.t_last, a.t_last());
    first = false;
  }
  return rep;
}

namespace {

void print_row(std::ostream& os, const CriterionRow& r) {
  char buf[256];
  const std::string value = r.available ? format_double(r.value) : "missing";
  std::snprintf(buf, sizeof buf, "%-22s %-6s q=%-8s r=%-8s range=[%s,%s] %-12s %-24s %s\n", r.family.c_str(),
                r.label.c_str(), format_exponent(r.q).c_str(), format_exponent(r.r).c_str(),
                format_exponent(r.q_min).c_str(), format_exponent(r.q_max).c_str(),
                r.in_range ? "in-range" : "out-of-range", value.c_str(),
                r.available ? (r.finite ? "finite" : "INFINITE") : "");
  os << buf;
}

}  // namespace

void print_report(std::ostream& os, const CriterionReport& rep) {
  os << "criterion report over t in [" << format_double(rep.t_first) << ", " << format_double(rep.t_last) << "]\n";
  for (const auto& r : rep.rows) print_row(os, r);
  print_row(os, rep.grad_q_linf_l3);
  print_row(os, rep.grad_q_l3_l9);
  for (const auto& g : rep.gamma_rows) {
    os << "max-regularity q=" << format_exponent(g.q) << " gamma=" << format_exponent(g.gamma) << "\n";
    print_row(os, g.lap_q);
    print_row(os, g.dt_q);
  }
}

// ---------------------------------------------------------------------------

FieldNorms::FieldNorms(const SimState& s, const TensorField* q_prev, double dt)
    : grad_u_(magnitude(gradient(s.u, FieldRole::Velocity))),
      lap_q_(magnitude(laplacian(s.q, FieldRole::OrderTensor))),
      grad_q_(magnitude(gradient(s.q, FieldRole::OrderTensor))),
      u_(magnitude(s.u)) {
  if (q_prev && dt > 0.0) {
    TensorField d = s.q;
    d -= *q_prev;
    d *= 1.0 / dt;
    dt_q_ = magnitude(d);
  }
}

double FieldNorms::norm(const std::string& label, double q) const {
  if (label == "gradu") return lp_norm_of_magnitude(grad_u_, q);
  if (label == "lapq") return lp_norm_of_magnitude(lap_q_, q);
  if (label == "gradq") return lp_norm_of_magnitude(grad_q_, q);
  if (label == "u") return lp_norm_of_magnitude(u_, q);
  if (label == "dtq") return dt_q_ ? lp_norm_of_magnitude(*dt_q_, q) : std::nan("");
  throw std::invalid_argument("unknown norm label '" + label + "'");
}

RunMonitor::RunMonitor(const ModelParams& p, const VariantConfig& v, const CriterionConfig& cfg)
    : params_(p), variants_(v), cfg_(cfg) {
  for (const auto& k : required_accumulators(cfg))
    accs_.emplace(k, MixedNormAccumulator(std::get<0>(k), std::get<1>(k), std::get<2>(k)));
}

const DiagnosticsRecord& RunMonitor::observe(const SimState& s, double dt) {
  records_.push_back(energy_ledger(s, params_, variants_));
  if (records_.size() > 1) residuals_.push_back(energy_residual(records_[records_.size() - 2], records_.back(), dt));
  const FieldNorms norms(s, q_prev_ ? &*q_prev_ : nullptr, dt);
  last_norms_.clear();
  for (auto& [k, acc] : accs_) {
    const double v = norms.norm(std::get<0>(k), std::get<1>(k));
    last_norms_.push_back(v);
    if (!std::isnan(v)) acc.accumulate(v, s.t);
  }
  q_prev_ = s.q;
  return records_.back();
}

double RunMonitor::max_residual() const {
  double m = 0.0;
  for (double r : residuals_) m = std::max(m, r);
  return m;
}

std::vector<std::string> RunMonitor::mixed_columns() const {
  std::vector<std::string> out;
  for (const auto& [k, acc] : accs_) out.push_back(acc.column_name());
  return out;
}

// ---------------------------------------------------------------------------

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& comments,
                     std::vector<std::string> mixed_columns)
    : os_(os), n_mixed_(mixed_columns.size()) {
  for (const auto& c : comments) os_ << "# " << c << "\n";
  bool first = true;
  for (const auto& c : record_columns()) {
    os_ << (first ? "" : ",") << c;
    first = false;
  }
  for (const auto& c : mixed_columns) os_ << "," << c;
  os_ << "\n";
}

void CsvWriter::write_row(const DiagnosticsRecord& r, const std::vector<double>& mixed) {
  if (mixed.size() != n_mixed_) throw std::invalid_argument("CsvWriter: mixed column count mismatch");
  bool first = true;
  for (double v : record_values(r)) {
    os_ << (first ? "" : ",") << format_double(v);
    first = false;
  }
  for (double v : mixed) os_ << "," << format_double(v);
  os_ << "\n";
}

int CsvTable::find(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  int lineno = 0;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      t.comments.push_back(line.size() > 2 ? line.substr(2) : "");
      continue;
    }
    auto cells = split(line);
    if (!have_header) {
      t.columns = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != t.columns.size())
      throw FormatError("csv line " + std::to_string(lineno) + ": expected " + std::to_string(t.columns.size()) +
                        " fields, got " + std::to_string(cells.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (c.empty() || end != c.c_str() + c.size())
        throw FormatError("csv line " + std::to_string(lineno) + ": not a number '" + c + "'");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw FormatError("csv: missing header row");
  return t;
}

std::map<MixedKey, MixedNormAccumulator> accumulators_from_csv(const CsvTable& table, const CriterionConfig& cfg) {
  const int tcol = table.find("t");
  if (tcol < 0) throw FormatError("csv: missing column 't'");
  std::map<MixedKey, MixedNormAccumulator> accs;
  std::map<MixedKey, int> cols;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    const std::string& name = table.columns[i];
    if (name.rfind("mixed_", 0) != 0) continue;
    const auto rpos = name.rfind("_r");
    const auto qpos = name.rfind("_q", rpos);
    if (rpos == std::string::npos || qpos == std::string::npos || qpos <= 6)
      throw FormatError("csv: malformed mixed column '" + name + "'");
    const std::string label = name.substr(6, qpos - 6);
    const double q = parse_exponent(name.substr(qpos + 2, rpos - qpos - 2));
    const double r = parse_exponent(name.substr(rpos + 2));
    MixedKey k{label, q, r};
    accs.emplace(k, MixedNormAccumulator(label, q, r));
    cols[k] = static_cast<int>(i);
  }
  std::vector<std::string> missing;
  for (double q : with_five_halves(cfg.q_list)) {
    const MixedKey k{"gradu", q, conjugate_exponent(q)};
    if (!accs.count(k)) missing.push_back(MixedNormAccumulator("gradu", q, conjugate_exponent(q)).column_name());
  }
  if (!missing.empty()) {
    std::string msg = "csv: missing required column(s):";
    for (const auto& m : missing) msg += " " + m;
    throw FormatError(msg);
  }
  for (const auto& row : table.rows)
    for (auto& [k, acc] : accs) {
      const double v = row[cols[k]];
      if (!std::isnan(v)) acc.accumulate(v, row[tcol]);
    }
  return accs;
}

}  // namespace qtensor
