#include "qtensor/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "qtensor/errors.hpp"

namespace qtensor {

StepControl RunConfig::step_control() const {
  StepControl c;
  c.cfl_target = time.cfl;
  c.dt_min = time.dt_min;
  c.dt_max = time.dt_max;
  c.viscous_implicit = time.viscous_implicit;
  c.adaptive = !(time.dt > 0.0);
  c.dt = c.adaptive ? time.dt_max : time.dt;
  return c;
}

StepOptions RunConfig::step_options() const { return StepOptions{time.couple_flow, time.upwind}; }

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double to_double(const std::string& v) {
  const std::string l = lower(v);
  if (l == "inf" || l == "infinity") return kInf;
  std::size_t used = 0;
  double x;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("expected a number, got '" + v + "'");
  }
  if (used != v.size()) throw std::invalid_argument("expected a number, got '" + v + "'");
  return x;
}

long long to_int(const std::string& v) {
  std::size_t used = 0;
  long long x;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("expected an integer, got '" + v + "'");
  }
  if (used != v.size()) throw std::invalid_argument("expected an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& v) {
  const std::string l = lower(v);
  if (l == "true" || l == "yes" || l == "on" || l == "1") return true;
  if (l == "false" || l == "no" || l == "off" || l == "0") return false;
  throw std::invalid_argument("expected true/false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& v) {
  std::vector<double> out;
  std::string s = v;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(parse_exponent(tok));
  return out;
}

std::string fmt(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return format_double(x);
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + fmt(v[i]);
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, std::map<std::string, Setter>>& setters() {
  static const std::map<std::string, std::map<std::string, Setter>> table = [] {
    std::map<std::string, std::map<std::string, Setter>> t;
    auto& g = t["grid"];
    g["nx"] = [](RunConfig& c, const std::string& v) { c.grid.nx = static_cast<int>(to_int(v)); };
    g["ny"] = [](RunConfig& c, const std::string& v) { c.grid.ny = static_cast<int>(to_int(v)); };
    g["nz"] = [](RunConfig& c, const std::string& v) { c.grid.nz = static_cast<int>(to_int(v)); };
    g["lx"] = [](RunConfig& c, const std::string& v) { c.grid.lx = to_double(v); };
    g["ly"] = [](RunConfig& c, const std::string& v) { c.grid.ly = to_double(v); };
    g["lz"] = [](RunConfig& c, const std::string& v) { c.grid.lz = to_double(v); };
    g["bc_x"] = [](RunConfig& c, const std::string& v) { c.grid.bc[0] = boundary_tag_from_string(v); };
    g["bc_y"] = [](RunConfig& c, const std::string& v) { c.grid.bc[1] = boundary_tag_from_string(v); };
    g["bc_z"] = [](RunConfig& c, const std::string& v) { c.grid.bc[2] = boundary_tag_from_string(v); };

    auto& p = t["params"];
    p["nu"] = [](RunConfig& c, const std::string& v) { c.params.nu = to_double(v); };
    p["gamma"] = [](RunConfig& c, const std::string& v) { c.params.gamma = to_double(v); };
    p["epsilon"] = [](RunConfig& c, const std::string& v) { c.params.epsilon = to_double(v); };
    p["a"] = [](RunConfig& c, const std::string& v) { c.params.a = to_double(v); };
    p["b"] = [](RunConfig& c, const std::string& v) { c.params.b = to_double(v); };
    p["c"] = [](RunConfig& c, const std::string& v) { c.params.c = to_double(v); };

    auto& va = t["variants"];
    va["stretching"] = [](RunConfig& c, const std::string& v) { c.variants.stretching = stretching_from_string(v); };
    va["potential"] = [](RunConfig& c, const std::string& v) { c.variants.potential = potential_from_string(v); };
    va["m1_theta"] = [](RunConfig& c, const std::string& v) { c.variants.m1_theta = to_double(v); };

    auto& tm = t["time"];
    tm["t_end"] = [](RunConfig& c, const std::string& v) { c.time.t_end = to_double(v); };
    tm["cfl"] = [](RunConfig& c, const std::string& v) { c.time.cfl = to_double(v); };
    tm["dt"] = [](RunConfig& c, const std::string& v) { c.time.dt = to_double(v); };
    tm["dt_min"] = [](RunConfig& c, const std::string& v) { c.time.dt_min = to_double(v); };
    tm["dt_max"] = [](RunConfig& c, const std::string& v) { c.time.dt_max = to_double(v); };
    tm["viscous_implicit"] = [](RunConfig& c, const std::string& v) { c.time.viscous_implicit = to_bool(v); };
    tm["upwind"] = [](RunConfig& c, const std::string& v) { c.time.upwind = to_bool(v); };
    tm["couple_flow"] = [](RunConfig& c, const std::string& v) { c.time.couple_flow = to_bool(v); };
    tm["max_steps"] = [](RunConfig& c, const std::string& v) { c.time.max_steps = to_int(v); };

    auto& ic = t["ic"];
    ic["preset"] = [](RunConfig& c, const std::string& v) { c.ic.preset = lower(v); };
    ic["snapshot"] = [](RunConfig& c, const std::string& v) { c.ic.snapshot = v; };
    ic["amplitude"] = [](RunConfig& c, const std::string& v) { c.ic.amplitude = to_double(v); };
    ic["u_amplitude"] = [](RunConfig& c, const std::string& v) { c.ic.u_amplitude = to_double(v); };
    ic["director"] = [](RunConfig& c, const std::string& v) {
      const auto l = to_list(v);
      if (l.size() != 3) throw std::invalid_argument("director needs three components");
      c.ic.director = {l[0], l[1], l[2]};
    };
    ic["seed"] = [](RunConfig& c, const std::string& v) {
      std::size_t used = 0;
      if (v.empty() || v[0] == '-') throw std::invalid_argument("seed must be a non-negative integer");
      try {
        c.ic.seed = std::stoull(v, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != v.size()) throw std::invalid_argument("seed must be a non-negative integer");
    };
    ic["modes"] = [](RunConfig& c, const std::string& v) { c.ic.modes = static_cast<int>(to_int(v)); };

    auto& d = t["diagnostics"];
    d["q_list"] = [](RunConfig& c, const std::string& v) { c.diagnostics.criteria.q_list = to_list(v); };
    d["serrin_p"] = [](RunConfig& c, const std::string& v) { c.diagnostics.criteria.serrin_p = to_list(v); };
    d["csv"] = [](RunConfig& c, const std::string& v) { c.diagnostics.csv = v; };
    d["snapshot_every"] = [](RunConfig& c, const std::string& v) { c.diagnostics.snapshot_every = to_int(v); };
    return t;
  }();
  return table;
}

// Which key a validation message refers to (messages start with the key).
std::pair<std::string, std::string> key_of(const std::string& msg) {
  static const std::map<std::string, std::string> section{
      {"nx", "grid"},      {"ny", "grid"},         {"nz", "grid"},       {"lx", "grid"},        {"ly", "grid"},
      {"lz", "grid"},      {"slab", "grid"},       {"nu", "params"},     {"gamma", "params"},   {"epsilon", "params"},
      {"a", "params"},     {"b", "params"},        {"c", "params"},      {"m1_theta", "variants"},
      {"t_end", "time"},   {"cfl", "time"},        {"dt", "time"},       {"dt_min", "time"},    {"dt_max", "time"},
      {"max_steps", "time"}, {"preset", "ic"},     {"snapshot", "ic"},   {"amplitude", "ic"},   {"modes", "ic"},
      {"q_list", "diagnostics"}, {"serrin_p", "diagnostics"}, {"snapshot_every", "diagnostics"}};
  const std::string first = msg.substr(0, msg.find(' '));
  const auto it = section.find(first);
  if (it == section.end()) return {"", ""};
  if (first == "slab") return {"grid", "bc_z"};
  return {it->second, first};
}

}  // namespace

std::vector<std::string> config_violations(const RunConfig& c) {
  std::vector<std::string> out = grid_violations(c.grid);
  for (auto& v : param_violations(c.params)) out.push_back(v);
  if (!(c.variants.m1_theta >= 0.0 && c.variants.m1_theta <= 1.0)) out.push_back("m1_theta must lie in [0, 1]");
  const TimeConfig& t = c.time;
  if (!(t.t_end >= 0.0) || !std::isfinite(t.t_end)) out.push_back("t_end must be >= 0");
  if (!(t.cfl > 0.0 && t.cfl <= 1.0)) out.push_back("cfl must lie in (0, 1]");
  if (!(t.dt_min > 0.0)) out.push_back("dt_min must be > 0");
  if (!(t.dt_max >= t.dt_min)) out.push_back("dt_max must be >= dt_min");
  if (t.dt < 0.0 || !std::isfinite(t.dt)) out.push_back("dt must be >= 0 (0 selects adaptive stepping)");
  if (t.max_steps < 0) out.push_back("max_steps must be >= 0");
  static const std::vector<std::string> presets{"zero", "taylor-green-q0", "uniaxial-cosine", "random-smooth",
                                                "snapshot"};
  if (std::find(presets.begin(), presets.end(), c.ic.preset) == presets.end())
    out.push_back("preset '" + c.ic.preset +
                  "' unknown (expected zero|taylor-green-q0|uniaxial-cosine|random-smooth|snapshot)");
  if (c.ic.preset == "snapshot" && c.ic.snapshot.empty()) out.push_back("snapshot path required for preset = snapshot");
  if (!std::isfinite(c.ic.amplitude)) out.push_back("amplitude must be finite");
  if (c.ic.modes < 1) out.push_back("modes must be >= 1");
  for (double q : c.diagnostics.criteria.q_list)
    if (!(q >= 1.5)) out.push_back("q_list entries must be >= 3/2");
  for (double p : c.diagnostics.criteria.serrin_p)
    if (!(p >= 3.0)) out.push_back("serrin_p entries must be >= 3");
  if (c.diagnostics.snapshot_every < 0) out.push_back("snapshot_every must be >= 0");
  return out;
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  RunConfig c;
  std::vector<std::string> errors;
  std::map<std::pair<std::string, std::string>, int> seen;
  std::istringstream is(text);
  std::string raw, section;
  int lineno = 0;
  auto where = [&](int line) { return source + ":" + std::to_string(line) + ": "; };
  while (std::getline(is, raw)) {
    ++lineno;
    std::string line = raw;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back(where(lineno) + "malformed section header '" + line + "'");
        continue;
      }
      section = lower(trim(line.substr(1, line.size() - 2)));
      if (!setters().count(section)) errors.push_back(where(lineno) + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back(where(lineno) + "expected 'key = value', got '" + line + "'");
      continue;
    }
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) {
      errors.push_back(where(lineno) + "key '" + key + "' outside any section");
      continue;
    }
    const auto sec = setters().find(section);
    if (sec == setters().end()) continue;  // already reported
    const auto it = sec->second.find(key);
    if (it == sec->second.end()) {
      errors.push_back(where(lineno) + "unknown key '" + key + "' in [" + section + "]");
      continue;
    }
    if (seen.count({section, key})) {
      errors.push_back(where(lineno) + "duplicate key '" + key + "' (first set on line " +
                       std::to_string(seen[{section, key}]) + ")");
      continue;
    }
    seen[{section, key}] = lineno;
    try {
      it->second(c, value);
    } catch (const ValidationError& e) {
      for (const auto& v : e.violations()) errors.push_back(where(lineno) + v);
    } catch (const std::exception& e) {
      errors.push_back(where(lineno) + key + ": " + e.what());
    }
  }
  for (const auto& v : config_violations(c)) {
    const auto [sec, key] = key_of(v);
    const auto it = seen.find({sec, key});
    errors.push_back(it != seen.end() ? where(it->second) + v : source + ": " + v);
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("config not found: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  os << "[grid]\n"
     << "nx = " << c.grid.nx << "\nny = " << c.grid.ny << "\nnz = " << c.grid.nz << "\n"
     << "lx = " << fmt(c.grid.lx) << "\nly = " << fmt(c.grid.ly) << "\nlz = " << fmt(c.grid.lz) << "\n"
     << "bc_x = " << to_string(c.grid.bc[0]) << "\nbc_y = " << to_string(c.grid.bc[1])
     << "\nbc_z = " << to_string(c.grid.bc[2]) << "\n\n";
  os << "[params]\n"
     << "nu = " << fmt(c.params.nu) << "\ngamma = " << fmt(c.params.gamma) << "\nepsilon = " << fmt(c.params.epsilon)
     << "\na = " << fmt(c.params.a) << "\nb = " << fmt(c.params.b) << "\nc = " << fmt(c.params.c) << "\n\n";
  os << "[variants]\n"
     << "stretching = " << to_string(c.variants.stretching) << "\npotential = " << to_string(c.variants.potential)
     << "\nm1_theta = " << fmt(c.variants.m1_theta) << "\n\n";
  os << "[time]\n"
     << "t_end = " << fmt(c.time.t_end) << "\ncfl = " << fmt(c.time.cfl) << "\ndt = " << fmt(c.time.dt)
     << "\ndt_min = " << fmt(c.time.dt_min) << "\ndt_max = " << fmt(c.time.dt_max)
     << "\nviscous_implicit = " << (c.time.viscous_implicit ? "true" : "false")
     << "\nupwind = " << (c.time.upwind ? "true" : "false")
     << "\ncouple_flow = " << (c.time.couple_flow ? "true" : "false") << "\nmax_steps = " << c.time.max_steps
     << "\n\n";
  os << "[ic]\npreset = " << c.ic.preset << "\n";
  if (!c.ic.snapshot.empty()) os << "snapshot = " << c.ic.snapshot << "\n";
  os << "amplitude = " << fmt(c.ic.amplitude) << "\n";
  if (c.ic.u_amplitude) os << "u_amplitude = " << fmt(*c.ic.u_amplitude) << "\n";
  os << "director = " << fmt(c.ic.director[0]) << " " << fmt(c.ic.director[1]) << " " << fmt(c.ic.director[2])
     << "\nseed = " << c.ic.seed << "\nmodes = " << c.ic.modes << "\n\n";
  os << "[diagnostics]\n"
     << "q_list = " << fmt_list(c.diagnostics.criteria.q_list)
     << "\nserrin_p = " << fmt_list(c.diagnostics.criteria.serrin_p) << "\ncsv = " << c.diagnostics.csv
     << "\nsnapshot_every = " << c.diagnostics.snapshot_every << "\n";
  return os.str();
}

}  // namespace qtensor
