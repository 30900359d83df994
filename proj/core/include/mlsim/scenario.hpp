#pragma once

#include <string>
#include <vector>

#include "mlsim/comms.hpp"
#include "mlsim/demand.hpp"
#include "mlsim/geometry.hpp"
#include "mlsim/lateral.hpp"
#include "mlsim/longitudinal.hpp"
#include "mlsim/platooning.hpp"

namespace mlsim {

/// A full scenario: strategy, market penetration, demand, geometry and all
/// behavioral parameter sets, plus run horizon and seeds.
struct ScenarioConfig {
  Strategy strategy = Strategy::BASE;
  double market_penetration = 0.0;  // fraction of demand equipped with CACC

  NetworkGeometry geometry;
  DemandTable demand;
  double offramp_split = 0.15;  // share routed to each downstream off-ramp

  IdmParams cacc;        // Table-4 control set; time_gap handled per step
  IdmParams human;       // desired_speed replaced per vehicle at spawn
  PlatoonParams platoon;
  LaneChangeParams lane_change;
  ChannelModel channel;

  double timestep = 0.1;          // s
  double horizon = 4500.0;        // s
  double warmup = 900.0;          // s excluded from all metrics
  double lc_decision_period = 1.0;   // s between discretionary decisions per vehicle
  double lc_cooldown = 3.0;          // s after an executed change
  double vehicle_length = 4.5;       // m
  double ramp_entry_speed = 20.0;    // m/s cap at on-ramp entry
  double free_flow_speed = kmh_to_ms(105.0);  // m/s, PTI reference
  double metrics_sample_period = 1.0;         // s

  std::string vt_micro_coeffs_path;  // empty -> fuel metrics disabled

  /// Rebuilds DLA access zones from the geometry (no-op for other
  /// strategies, which carry no zones).
  void finalize();
};

/// Full-scale defaults: the synthetic 8-km segment with the paper's demand
/// table and control parameters.
ScenarioConfig default_scenario();

/// Desk-scale preset: 2-km segment with both interchanges scaled down,
/// 1800 s horizon, demand halved. Intended for CI-speed acceptance runs.
ScenarioConfig desk_scale(ScenarioConfig cfg);

/// Cross-field validation; returns human-readable violations (empty = ok).
std::vector<std::string> validate_scenario(const ScenarioConfig& cfg);

}  // namespace mlsim
