#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mlsim/types.hpp"

namespace mlsim {

/// VT-Micro fuel model: ln(rate) = sum_{i,j in 0..3} K[i][j] * v^i * a^j with
/// separate coefficient matrices for the positive- and negative-acceleration
/// regimes. v in km/h, a in km/h/s, rate in L/s. Coefficients are supplied
/// externally; without them fuel metrics are disabled.
struct VtMicroModel {
  std::array<std::array<double, 4>, 4> k_pos{};
  std::array<std::array<double, 4>, 4> k_neg{};
  bool loaded = false;

  double fuel_rate(double v_kmh, double a_kmh_s) const;
};

/// Loads coefficients from CSV lines "regime,i,j,value" with regime pos|neg.
/// Throws ConfigError on malformed input or missing entries.
VtMicroModel load_vt_micro(const std::string& csv_path);

/// Per-class order statistics of mainline travel times.
struct ClassTravelStats {
  int count = 0;
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

struct PlatoonTick {
  double time = 0.0;
  int cacc_present = 0;
  int platooned = 0;
  int platoon_count = 0;
};

/// Everything one replication reports.
struct RunSummary {
  double vmt_veh_km = 0.0;
  double vht_veh_h = 0.0;
  std::optional<double> q_kmh;
  std::optional<double> pti;
  int traverse_count = 0;
  std::optional<double> speed_stddev_ms;
  std::optional<double> fuel_l_per_veh_s;
  double pct_platooned = 0.0;           // 0..100, time-average
  std::optional<double> mean_platoon_depth;
  double vhp_veh_h = 0.0;               // raw time integral
  std::optional<double> vhp_per_hour;   // normalized per measured hour
  std::array<std::optional<ClassTravelStats>, 3> travel_stats;  // by VehClass
  std::uint64_t entered = 0;
  std::uint64_t exited = 0;
  std::uint64_t missed_exits = 0;
  std::uint64_t merge_starvations = 0;
  std::uint64_t latent_unserved = 0;
  std::uint64_t fallback_events = 0;
};

/// Streaming accumulators for one replication. Single writer; warmup
/// filtering is the caller's responsibility (the simulation only feeds
/// post-warmup samples).
class MetricsLedger {
public:
  explicit MetricsLedger(double free_flow_time_s) : free_flow_time_(free_flow_time_s) {}

  void add_distance_time(double veh_km, double veh_h) {
    vmt_ += veh_km;
    vht_ += veh_h;
  }
  void add_speed_sample(double v_ms) {
    ++speed_n_;
    speed_sum_ += v_ms;
    speed_sumsq_ += v_ms * v_ms;
  }
  void add_fuel(double liters, double veh_seconds) {
    fuel_l_ += liters;
    fuel_veh_s_ += veh_seconds;
  }
  void add_platoon_tick(const PlatoonTick& tick, double tick_seconds);
  void add_depth_sample(int depth) {
    ++depth_n_;
    depth_sum_ += depth;
  }
  void add_travel_time(VehClass klass, double seconds, double entry_time);

  const std::vector<PlatoonTick>& platoon_ticks() const { return platoon_ticks_; }
  const std::vector<std::pair<double, double>>& travel_times(VehClass k) const {
    return travel_times_[static_cast<int>(k)];
  }

  double measured_seconds() const { return measured_s_; }

  RunSummary summarize() const;

  // Counters the simulation owns but reports through the summary.
  std::uint64_t entered = 0, exited = 0, missed_exits = 0, merge_starvations = 0,
                latent_unserved = 0, fallback_events = 0;

private:
  double free_flow_time_;
  double vmt_ = 0.0, vht_ = 0.0;
  std::uint64_t speed_n_ = 0;
  double speed_sum_ = 0.0, speed_sumsq_ = 0.0;
  double fuel_l_ = 0.0, fuel_veh_s_ = 0.0;
  bool fuel_enabled_ = false;
  std::vector<PlatoonTick> platoon_ticks_;
  double measured_s_ = 0.0;
  double vhp_veh_s_ = 0.0;
  double pct_sum_ = 0.0;
  std::uint64_t pct_n_ = 0;
  std::uint64_t depth_n_ = 0;
  double depth_sum_ = 0.0;
  std::vector<std::pair<double, double>> travel_times_[3];  // (entry_time, tt)

public:
  void set_fuel_enabled(bool on) { fuel_enabled_ = on; }
};

/// Q value: VMT/VHT in km/h; absent when VHT is zero.
std::optional<double> q_value(double vmt_veh_km, double vht_veh_h);

/// 95th-percentile travel time over free-flow time, linear interpolation
/// between order statistics; needs at least `min_samples` traverses.
std::optional<double> planning_time_index(std::vector<double> travel_times, double free_flow_time,
                                          int min_samples = 20);

/// Population standard deviation.
std::optional<double> population_stddev(std::uint64_t n, double sum, double sumsq);

/// Linear-interpolated quantile of a sorted sample (q in [0,1]).
double interpolated_quantile(const std::vector<double>& sorted, double q);

ClassTravelStats travel_stats_of(std::vector<double> times);

}  // namespace mlsim
