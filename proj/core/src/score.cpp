#include "mlsim/score.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace mlsim {

MeanSe mean_se(const std::vector<double>& values) {
  MeanSe out;
  out.n = static_cast<int>(values.size());
  if (out.n == 0) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / out.n;
  if (out.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    double var = ss / (out.n - 1);
    out.se = std::sqrt(var / out.n);
  }
  return out;
}

namespace {

enum class Direction { HigherBetter, LowerBetter };

std::vector<double> extract(const CellResult& cell, double (*get)(const RunSummary&),
                            bool (*has)(const RunSummary&)) {
  std::vector<double> v;
  for (const auto& r : cell.reps) {
    if (has(r)) v.push_back(get(r));
  }
  return v;
}

/// +1 / 0 / -1 against the baseline with the 1.96-pooled-SE noise band.
std::optional<int> traditional_score(const std::vector<double>& strat,
                                     const std::vector<double>& base, Direction dir) {
  if (strat.empty() || base.empty()) return std::nullopt;
  MeanSe s = mean_se(strat);
  MeanSe b = mean_se(base);
  double band = 1.96 * std::sqrt(s.se * s.se + b.se * b.se);
  double delta = s.mean - b.mean;
  if (std::abs(delta) <= band) return 0;
  bool improved = dir == Direction::HigherBetter ? delta > 0.0 : delta < 0.0;
  return improved ? 1 : -1;
}

double get_q(const RunSummary& r) { return *r.q_kmh; }
bool has_q(const RunSummary& r) { return r.q_kmh.has_value(); }
double get_sigma(const RunSummary& r) { return *r.speed_stddev_ms; }
bool has_sigma(const RunSummary& r) { return r.speed_stddev_ms.has_value(); }
double get_fuel(const RunSummary& r) { return *r.fuel_l_per_veh_s; }
bool has_fuel(const RunSummary& r) { return r.fuel_l_per_veh_s.has_value(); }
double get_gp_median(const RunSummary& r) {
  return r.travel_stats[static_cast<int>(VehClass::GP)]->median;
}
bool has_gp_median(const RunSummary& r) {
  return r.travel_stats[static_cast<int>(VehClass::GP)].has_value();
}
double get_vhp(const RunSummary& r) { return r.vhp_per_hour.value_or(0.0); }
bool has_vhp(const RunSummary&) { return true; }
double get_pct(const RunSummary& r) { return r.pct_platooned; }
bool has_pct(const RunSummary&) { return true; }

void normalize_category(std::vector<ScoreRow>& rows, std::optional<int> ScoreRow::*field,
                        std::vector<double>& totals) {
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (const auto& r : rows) {
    if (!(r.*field)) continue;
    double v = *(r.*field);
    if (!any) {
      lo = hi = v;
      any = true;
    } else {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!any) return;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!(rows[i].*field)) continue;
    double v = *(rows[i].*field);
    totals[i] += hi > lo ? (v - lo) / (hi - lo) : 0.5;
  }
}

}  // namespace

std::vector<ScoreRow> score_matrix(const std::vector<CellResult>& cells) {
  // Index BASE cells by MP.
  std::map<double, const CellResult*> base_by_mp;
  for (const auto& c : cells) {
    if (c.strategy == Strategy::BASE) base_by_mp[c.mp] = &c;
  }

  std::vector<ScoreRow> rows;
  for (const auto& c : cells) {
    if (c.strategy == Strategy::BASE) continue;
    ScoreRow row;
    row.strategy = c.strategy;
    row.mp = c.mp;
    auto bit = base_by_mp.find(c.mp);
    if (bit != base_by_mp.end()) {
      const CellResult& b = *bit->second;
      row.mobility = traditional_score(extract(c, get_q, has_q), extract(b, get_q, has_q),
                                       Direction::HigherBetter);
      row.safety = traditional_score(extract(c, get_sigma, has_sigma),
                                     extract(b, get_sigma, has_sigma), Direction::LowerBetter);
      row.equity =
          traditional_score(extract(c, get_gp_median, has_gp_median),
                            extract(b, get_gp_median, has_gp_median), Direction::LowerBetter);
      row.environment = traditional_score(extract(c, get_fuel, has_fuel),
                                          extract(b, get_fuel, has_fuel), Direction::LowerBetter);
    }
    rows.push_back(row);
  }

  // Platoon ranking per MP among the four strategies: 4 down to 1 by mean
  // VHP (pct-platooned breaks VHP ties); exact ties share the higher rank.
  std::map<double, std::vector<std::size_t>> by_mp;
  for (std::size_t i = 0; i < rows.size(); ++i) by_mp[rows[i].mp].push_back(i);
  for (auto& [mp, idxs] : by_mp) {
    struct Key {
      double vhp, pct;
      std::size_t row;
    };
    std::vector<Key> keys;
    for (std::size_t i : idxs) {
      const CellResult* cell = nullptr;
      for (const auto& c : cells) {
        if (c.strategy == rows[i].strategy && c.mp == mp) {
          cell = &c;
          break;
        }
      }
      if (!cell || cell->reps.empty()) continue;
      keys.push_back({mean_se(extract(*cell, get_vhp, has_vhp)).mean,
                      mean_se(extract(*cell, get_pct, has_pct)).mean, i});
    }
    std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
      if (a.vhp != b.vhp) return a.vhp > b.vhp;
      if (a.pct != b.pct) return a.pct > b.pct;
      return a.row < b.row;
    });
    int next_rank = static_cast<int>(keys.size());
    for (std::size_t k = 0; k < keys.size(); ++k) {
      int rank;
      if (k > 0 && keys[k].vhp == keys[k - 1].vhp && keys[k].pct == keys[k - 1].pct) {
        rank = *rows[keys[k - 1].row].platoon_rank;  // share the higher rank
      } else {
        rank = next_rank;
      }
      rows[keys[k].row].platoon_rank = rank;
      --next_rank;
    }
  }

  std::vector<double> totals(rows.size(), 0.0);
  normalize_category(rows, &ScoreRow::mobility, totals);
  normalize_category(rows, &ScoreRow::safety, totals);
  normalize_category(rows, &ScoreRow::equity, totals);
  normalize_category(rows, &ScoreRow::environment, totals);
  normalize_category(rows, &ScoreRow::platoon_rank, totals);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].normalized_total = totals[i];

  std::sort(rows.begin(), rows.end(), [](const ScoreRow& a, const ScoreRow& b) {
    if (a.strategy != b.strategy) return a.strategy < b.strategy;
    return a.mp < b.mp;
  });
  return rows;
}

}  // namespace mlsim
