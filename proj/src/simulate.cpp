#include "qtensor/simulate.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "qtensor/errors.hpp"
#include "qtensor/presets.hpp"
#include "qtensor/snapshot.hpp"

namespace qtensor {

std::string snapshot_name(std::int64_t step) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snapshot_%06lld.qts", static_cast<long long>(step));
  return buf;
}

SimulateResult simulate(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  validate(cfg.grid);
  validate(cfg.params);
  std::filesystem::create_directories(out_dir);
  SimulateResult res;
  res.csv = std::filesystem::path(cfg.diagnostics.csv).is_absolute() ? std::filesystem::path(cfg.diagnostics.csv)
                                                                      : out_dir / cfg.diagnostics.csv;
  if (res.csv.has_parent_path()) std::filesystem::create_directories(res.csv.parent_path());
  std::ofstream csv(res.csv);
  if (!csv) throw FormatError("cannot write " + res.csv.string());

  std::vector<std::string> comments;
  {
    std::istringstream is(serialize_config(cfg));
    for (std::string line; std::getline(is, line);)
      if (!line.empty()) comments.push_back(line);
  }
  const SimState initial = initial_state(cfg);
  RunMonitor mon(cfg.params, cfg.variants, cfg.diagnostics.criteria);
  mon.observe(initial);
  CsvWriter writer(csv, comments, mon.mixed_columns());

  RunHooks hooks;
  hooks.blowup_snapshot = out_dir / "blowup.qts";
  hooks.max_steps = cfg.time.max_steps;
  hooks.on_step = [&](const SimState& s, double dt) {
    writer.write_row(mon.observe(s, dt), mon.last_norms());
    ++res.steps;
    if (cfg.diagnostics.snapshot_every > 0 && s.step_index % cfg.diagnostics.snapshot_every == 0) {
      const auto path = out_dir / snapshot_name(s.step_index);
      write_snapshot(path, Snapshot{s.t, s.p, s.u, s.q});
      res.snapshots.push_back(path);
    }
  };
  res.final_state = run(initial, cfg.params, cfg.variants, cfg.step_control(), cfg.time.t_end, hooks,
                        cfg.step_options());
  csv.flush();
  const auto final_path = out_dir / "final.qts";
  const SimState& f = res.final_state;
  write_snapshot(final_path, Snapshot{f.t, f.p, f.u, f.q});
  res.snapshots.push_back(final_path);
  res.max_residual = mon.max_residual();
  res.report = mon.report();
  return res;
}

}  // namespace qtensor
