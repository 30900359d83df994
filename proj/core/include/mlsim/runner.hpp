#pragma once

#include <filesystem>
#include <iosfwd>

#include "mlsim/config.hpp"
#include "mlsim/score.hpp"

namespace mlsim {

struct RunnerOptions {
  std::filesystem::path out_dir;
  int workers = 1;            // cells are embarrassingly parallel
  bool quiet = false;
};

/// Per-cell output directory: <out>/<strategy>/mp_<pct>/rep_<n>/.
std::filesystem::path cell_dir(const std::filesystem::path& out, Strategy s, double mp, int rep);

/// Executes every (strategy, MP, replication) cell, writing the per-cell CSV
/// set and the aggregate score matrix. Returns the collected cell results in
/// matrix order. Throws on runtime faults (caller maps to exit codes).
std::vector<CellResult> run_matrix(const ScenarioConfig& scenario, const RunMatrix& matrix,
                                   const RunnerOptions& opts, std::ostream* log);

/// Runs one replication with CSV sinks attached, writing summary.csv,
/// travel_times.csv, platoon_counts.csv, platoon_events.csv and
/// lane_changes.csv into `dir`.
RunSummary run_cell(const ScenarioConfig& scenario, Strategy s, double mp, int rep,
                    std::uint64_t base_seed, const std::filesystem::path& dir);

/// Writes the aggregate score matrix CSV.
void write_score_matrix(const std::vector<ScoreRow>& rows, const std::filesystem::path& path);

}  // namespace mlsim
