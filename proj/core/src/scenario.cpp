#include "mlsim/scenario.hpp"

#include <algorithm>
#include <cmath>

namespace mlsim {

void ScenarioConfig::finalize() {
  if (strategy == Strategy::DLA) {
    geometry.access_zones = access_zone_builder(geometry, 0);
  } else {
    geometry.access_zones.clear();
  }
}

ScenarioConfig default_scenario() {
  ScenarioConfig cfg;
  cfg.geometry = default_geometry();
  cfg.demand = default_demand();
  cfg.cacc = cacc_params(1.2);
  cfg.human = human_params(kmh_to_ms(105.0));
  cfg.finalize();
  return cfg;
}

ScenarioConfig desk_scale(ScenarioConfig cfg) {
  cfg.geometry.mainline_length = 2000.0;
  cfg.geometry.diverge_length = 400.0;
  cfg.geometry.interchanges = {
      {"Z2", 700.0, 800.0, 250.0},
      {"Z3", 1400.0, 1500.0, 250.0},
  };
  cfg.horizon = 1800.0;
  cfg.warmup = 360.0;
  // Peak-rate table halved, covering the shortened horizon.
  DemandTable t;
  t.interval_s = 900.0;
  for (const auto& zone : cfg.demand.zones()) {
    double peak_gp = 0.0, peak_hov = 0.0;
    for (const auto& r : cfg.demand.rows) {
      if (r.zone == zone) {
        peak_gp = std::max(peak_gp, r.gp_vph);
        peak_hov = std::max(peak_hov, r.hov_vph);
      }
    }
    t.rows.push_back({zone, 0.0, 0.5 * peak_gp, 0.5 * peak_hov});
    t.rows.push_back({zone, 900.0, 0.5 * peak_gp, 0.5 * peak_hov});
  }
  cfg.demand = t;
  cfg.finalize();
  return cfg;
}

std::vector<std::string> validate_scenario(const ScenarioConfig& cfg) {
  std::vector<std::string> v;
  auto req = [&](bool ok, const std::string& msg) {
    if (!ok) v.push_back(msg);
  };
  req(cfg.market_penetration >= 0.0 && cfg.market_penetration <= 1.0,
      "market_penetration must be in [0,1]");
  req(cfg.timestep > 0.0, "timestep must be positive");
  req(cfg.warmup < cfg.horizon, "warmup must be less than horizon");
  req(cfg.geometry.lanes >= 2, "at least two mainline lanes required");
  req(cfg.geometry.mainline_length > 0.0, "mainline length must be positive");
  for (const auto& ic : cfg.geometry.interchanges) {
    req(ic.off_ramp_pos > 0.0 && ic.off_ramp_pos < cfg.geometry.mainline_length,
        "off-ramp position outside mainline: " + ic.zone);
    req(ic.on_ramp_pos > 0.0 && ic.on_ramp_pos + ic.merge_length < cfg.geometry.mainline_length,
        "on-ramp merge lane outside mainline: " + ic.zone);
  }
  for (const auto& z : cfg.geometry.access_zones) {
    req(z.start >= 0.0 && z.end <= cfg.geometry.mainline_length && z.start < z.end,
        "access zone outside mainline");
  }
  req(cfg.platoon.t_intra < cfg.platoon.t_inter, "T_intra must be less than T_inter");
  req(cfg.platoon.min_size <= cfg.platoon.max_size, "platoon min_size must be <= max_size");
  req(cfg.platoon.min_size >= 2, "platoon min_size must be >= 2");
  req(cfg.platoon.dsrc_range > 0.0, "dsrc_range must be positive");
  req(cfg.platoon.fallback_loss_threshold >= 1, "fallback_loss_threshold must be >= 1");

  auto check_idm = [&](const IdmParams& p, const std::string& who) {
    req(p.max_accel > 0.0, who + ": a must be positive");
    req(p.comfort_decel > 0.0, who + ": b must be positive");
    req(p.coolness >= 0.0 && p.coolness <= 1.0, who + ": coolness must be in [0,1]");
    req(p.accel_exponent > 0.0, who + ": delta must be positive");
    req(p.desired_speed > 0.0, who + ": desired speed must be positive");
    req(p.min_gap >= 0.0, who + ": s0 must be non-negative");
    req(p.time_gap > 0.0, who + ": T must be positive");
  };
  check_idm(cfg.cacc, "cacc");
  check_idm(cfg.human, "human");

  req(cfg.lane_change.politeness >= 0.0, "politeness must be non-negative");
  req(cfg.lane_change.threshold >= 0.0, "lane-change threshold must be non-negative");
  req(cfg.lane_change.safe_decel > 0.0, "safe_decel must be positive");

  req(cfg.channel.load >= 0.0 && cfg.channel.load <= 1.0, "channel load must be in [0,1]");
  req(cfg.channel.max_range >= 0.0, "channel max_range must be non-negative");
  if (cfg.channel.kind == ChannelKind::Table) {
    // Construction validates monotonicity; re-check in case the table was
    // assembled by hand.
    try {
      table_channel(cfg.channel.table, cfg.channel.max_range);
    } catch (const ConfigError& e) {
      v.push_back(e.what());
    }
  }
  req(!cfg.demand.rows.empty(), "demand table is empty");
  for (const auto& r : cfg.demand.rows) {
    req(r.gp_vph >= 0.0 && r.hov_vph >= 0.0, "demand rates must be non-negative: " + r.zone);
  }
  // Exactly one demand zone may be the mainline origin; the rest must match
  // interchange zones or they would silently generate nothing.
  int mainline_zones = 0;
  for (const auto& z : cfg.demand.zones()) {
    bool matched = false;
    for (const auto& ic : cfg.geometry.interchanges) {
      if (ic.zone == z) matched = true;
    }
    if (!matched) ++mainline_zones;
  }
  req(mainline_zones <= 1, "more than one demand zone has no matching interchange");
  return v;
}

}  // namespace mlsim
