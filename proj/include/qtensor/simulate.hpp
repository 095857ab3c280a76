#pragma once

// Batch run driver behind `qtensor simulate`: initial state, stepping,
// per-step diagnostics CSV and QTS1 snapshots.

#include <cstdint>
#include <filesystem>
#include <vector>

#include "qtensor/config.hpp"
#include "qtensor/diagnostics.hpp"

namespace qtensor {

struct SimulateResult {
  SimState final_state;
  std::int64_t steps = 0;
  double max_residual = 0.0;
  CriterionReport report;
  std::filesystem::path csv;
  std::vector<std::filesystem::path> snapshots;
};

/// Runs cfg to t_end (or time.max_steps).  A relative diagnostics.csv path
/// is resolved against out_dir, which is created if needed.  The CSV starts
/// with the serialized config as '#' lines and holds one row per step.
/// Snapshots go to out_dir/snapshot_<step>.qts every snapshot_every steps,
/// plus out_dir/final.qts; a blow-up leaves out_dir/blowup.qts and throws
/// NumericalBlowup.
SimulateResult simulate(const RunConfig& cfg, const std::filesystem::path& out_dir);

/// "snapshot_000120.qts"
std::string snapshot_name(std::int64_t step);

}  // namespace qtensor
