#include "mlsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mlsim {

double VtMicroModel::fuel_rate(double v_kmh, double a_kmh_s) const {
  const auto& k = a_kmh_s >= 0.0 ? k_pos : k_neg;
  double vpow[4] = {1.0, v_kmh, v_kmh * v_kmh, v_kmh * v_kmh * v_kmh};
  double apow[4] = {1.0, a_kmh_s, a_kmh_s * a_kmh_s, a_kmh_s * a_kmh_s * a_kmh_s};
  double ln_moe = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) ln_moe += k[i][j] * vpow[i] * apow[j];
  }
  return std::exp(ln_moe);
}

VtMicroModel load_vt_micro(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw ConfigError("vt-micro: cannot open " + csv_path);
  VtMicroModel m;
  bool seen[2][4][4] = {};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    std::string regime;
    int i, j;
    double value;
    if (!(ss >> regime >> i >> j >> value)) {
      throw ConfigError("vt-micro: malformed line " + std::to_string(lineno));
    }
    if (i < 0 || i > 3 || j < 0 || j > 3) {
      throw ConfigError("vt-micro: index out of range at line " + std::to_string(lineno));
    }
    if (regime == "pos") {
      m.k_pos[i][j] = value;
      seen[0][i][j] = true;
    } else if (regime == "neg") {
      m.k_neg[i][j] = value;
      seen[1][i][j] = true;
    } else {
      throw ConfigError("vt-micro: regime must be pos|neg at line " + std::to_string(lineno));
    }
  }
  for (int r = 0; r < 2; ++r) {
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        if (!seen[r][i][j]) throw ConfigError("vt-micro: missing coefficient");
      }
    }
  }
  m.loaded = true;
  return m;
}

void MetricsLedger::add_platoon_tick(const PlatoonTick& tick, double tick_seconds) {
  platoon_ticks_.push_back(tick);
  measured_s_ += tick_seconds;
  vhp_veh_s_ += tick.platooned * tick_seconds;
  if (tick.cacc_present > 0) {
    pct_sum_ += static_cast<double>(tick.platooned) / tick.cacc_present;
    ++pct_n_;
  }
}

void MetricsLedger::add_travel_time(VehClass klass, double seconds, double entry_time) {
  travel_times_[static_cast<int>(klass)].emplace_back(entry_time, seconds);
}

RunSummary MetricsLedger::summarize() const {
  RunSummary s;
  s.vmt_veh_km = vmt_;
  s.vht_veh_h = vht_;
  s.q_kmh = q_value(vmt_, vht_);

  std::vector<double> all_times;
  for (int k = 0; k < 3; ++k) {
    std::vector<double> times;
    times.reserve(travel_times_[k].size());
    for (const auto& [entry, tt] : travel_times_[k]) times.push_back(tt);
    all_times.insert(all_times.end(), times.begin(), times.end());
    if (!times.empty()) {
      s.travel_stats[k] = travel_stats_of(std::move(times));
    }
  }
  s.traverse_count = static_cast<int>(all_times.size());
  s.pti = planning_time_index(std::move(all_times), free_flow_time_);

  s.speed_stddev_ms = population_stddev(speed_n_, speed_sum_, speed_sumsq_);
  if (fuel_enabled_ && fuel_veh_s_ > 0.0) s.fuel_l_per_veh_s = fuel_l_ / fuel_veh_s_;

  s.pct_platooned = pct_n_ > 0 ? 100.0 * pct_sum_ / static_cast<double>(pct_n_) : 0.0;
  if (depth_n_ > 0) s.mean_platoon_depth = depth_sum_ / static_cast<double>(depth_n_);
  s.vhp_veh_h = vhp_veh_s_ / 3600.0;
  if (measured_s_ > 0.0) s.vhp_per_hour = s.vhp_veh_h / (measured_s_ / 3600.0);

  s.entered = entered;
  s.exited = exited;
  s.missed_exits = missed_exits;
  s.merge_starvations = merge_starvations;
  s.latent_unserved = latent_unserved;
  s.fallback_events = fallback_events;
  return s;
}

std::optional<double> q_value(double vmt_veh_km, double vht_veh_h) {
  if (vht_veh_h <= 0.0) return std::nullopt;
  return vmt_veh_km / vht_veh_h;
}

double interpolated_quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  if (sorted.size() == 1) return sorted[0];
  double r = q * static_cast<double>(sorted.size() - 1);
  std::size_t lo = static_cast<std::size_t>(r);
  if (lo >= sorted.size() - 1) return sorted.back();
  double w = r - static_cast<double>(lo);
  return sorted[lo] + w * (sorted[lo + 1] - sorted[lo]);
}

std::optional<double> planning_time_index(std::vector<double> travel_times,
                                          double free_flow_time, int min_samples) {
  if (static_cast<int>(travel_times.size()) < min_samples || free_flow_time <= 0.0) {
    return std::nullopt;
  }
  std::sort(travel_times.begin(), travel_times.end());
  return interpolated_quantile(travel_times, 0.95) / free_flow_time;
}

std::optional<double> population_stddev(std::uint64_t n, double sum, double sumsq) {
  if (n == 0) return std::nullopt;
  double mean = sum / static_cast<double>(n);
  double var = sumsq / static_cast<double>(n) - mean * mean;
  return std::sqrt(std::max(0.0, var));
}

ClassTravelStats travel_stats_of(std::vector<double> times) {
  ClassTravelStats st;
  if (times.empty()) return st;
  std::sort(times.begin(), times.end());
  st.count = static_cast<int>(times.size());
  st.min = times.front();
  st.q1 = interpolated_quantile(times, 0.25);
  st.median = interpolated_quantile(times, 0.5);
  st.q3 = interpolated_quantile(times, 0.75);
  st.max = times.back();
  return st;
}

}  // namespace mlsim
