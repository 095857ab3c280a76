#pragma once

// Run configuration: INI-style text with [grid], [params], [variants],
// [time], [ic] and [diagnostics] blocks of `key = value` lines.  '#' and ';'
// start comments.  Parsing collects every problem with its file and line
// before reporting.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qtensor/constitutive.hpp"
#include "qtensor/diagnostics.hpp"
#include "qtensor/grid.hpp"
#include "qtensor/solver.hpp"

namespace qtensor {

struct TimeConfig {
  double t_end = 0.1;
  double cfl = 0.5;
  /// > 0 selects a fixed step; otherwise compute_dt() picks each step.
  double dt = 0.0;
  double dt_min = 1e-10;
  double dt_max = 1e-2;
  bool viscous_implicit = false;
  bool upwind = false;
  bool couple_flow = true;
  std::int64_t max_steps = 0;  // 0: run to t_end

  bool operator==(const TimeConfig&) const = default;
};

struct ICConfig {
  /// zero | taylor-green-q0 | uniaxial-cosine | random-smooth | snapshot
  std::string preset = "zero";
  std::string snapshot;  // path, for preset = snapshot
  double amplitude = 0.5;  // scalar order amplitude of Q
  /// Velocity amplitude; unset means 1 for taylor-green-q0 and 0 otherwise.
  std::optional<double> u_amplitude;
  std::array<double, 3> director{1.0, 0.0, 0.0};
  std::uint64_t seed = 1;
  int modes = 3;  // band limit of random-smooth

  bool operator==(const ICConfig&) const = default;
};

struct DiagnosticsConfig {
  CriterionConfig criteria;
  std::string csv = "diagnostics.csv";
  std::int64_t snapshot_every = 0;  // steps between QTS1 dumps, 0: final only

  bool operator==(const DiagnosticsConfig& o) const {
    return criteria.q_list == o.criteria.q_list && criteria.serrin_p == o.criteria.serrin_p && csv == o.csv &&
           snapshot_every == o.snapshot_every;
  }
};

struct RunConfig {
  GridSpec grid;
  ModelParams params;
  VariantConfig variants;
  TimeConfig time;
  ICConfig ic;
  DiagnosticsConfig diagnostics;

  bool operator==(const RunConfig&) const = default;

  StepControl step_control() const;
  StepOptions step_options() const;
};

/// Parses and validates.  Throws ValidationError listing every violation as
/// "<source>:<line>: <message>".
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");

/// Throws FormatError("config not found: ...") if the file cannot be read.
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& c);

/// Invariant violations of an assembled config (no line information).
std::vector<std::string> config_violations(const RunConfig& c);

}  // namespace qtensor
