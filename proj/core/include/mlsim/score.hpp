#pragma once

#include <optional>
#include <vector>

#include "mlsim/metrics.hpp"

namespace mlsim {

/// Replication results of one (strategy, MP) cell.
struct CellResult {
  Strategy strategy = Strategy::BASE;
  double mp = 0.0;
  std::vector<RunSummary> reps;
};

/// One row of the managed-lane score matrix (non-BASE strategies only).
/// Traditional scores are +1 improvement / 0 neutral / -1 degradation vs
/// BASE at the same MP, with a 1.96-pooled-standard-error noise band;
/// platoon_rank ranks the four strategies by mean VHP at each MP (4 = best,
/// ties share the higher rank, pct-platooned breaks VHP ties). Each category
/// is min-max normalized to [0,1] across the whole strategy x MP grid before
/// summation.
struct ScoreRow {
  Strategy strategy{};
  double mp = 0.0;
  std::optional<int> mobility;     // Q
  std::optional<int> safety;       // speed std dev
  std::optional<int> equity;       // median GP travel time
  std::optional<int> environment;  // fuel L/veh/s (absent when fuel disabled)
  std::optional<int> platoon_rank;
  double normalized_total = 0.0;
};

std::vector<ScoreRow> score_matrix(const std::vector<CellResult>& cells);

/// Mean and standard error of a per-replication extraction; absent values
/// are skipped.
struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  int n = 0;
};
MeanSe mean_se(const std::vector<double>& values);

}  // namespace mlsim
