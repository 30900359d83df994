#pragma once

#include "mlsim/types.hpp"

namespace mlsim {

/// One agent. Position is the front bumper, meters along the mainline
/// (aux merge lanes share the same coordinate). Lane 0 is the rightmost
/// mainline lane; negative lanes are per-ramp acceleration lanes.
struct VehicleState {
  VehicleId id = kNoVehicle;
  VehClass klass = VehClass::GP;
  ControlMode mode = ControlMode::ADS;
  int lane = 0;
  double position = 0.0;  // m
  double speed = 0.0;     // m/s
  double accel = 0.0;     // m/s^2
  double length = 4.5;    // m
  double desired_speed = 0.0;  // m/s, per-vehicle
  double fallback_desired_speed = 0.0;  // m/s, used by a CACC under human control

  int origin = 0;           // origin index (0 = mainline entry)
  int dest_offramp = -1;    // interchange index, -1 = mainline sink
  double entry_time = 0.0;

  // Platoon membership; valid only for CACC vehicles.
  PlatoonId platoon = kNoPlatoon;
  std::uint16_t platoon_depth = 0;  // 1-based, 1 = leader

  // Clustering state: same-lane join target during approach.
  VehicleId join_target = kNoVehicle;

  // Communication state for this step.
  bool link_exists = false;    // CACC predecessor within DSRC range
  bool reception_ok = false;   // this step's sampled reception outcome
  std::uint16_t loss_streak = 0;
  std::uint16_t success_streak = 0;

  double last_lane_change = -1e18;  // sim time of last executed change
  bool starved_flag = false;        // currently stopped at a merge-lane end

  bool in_platoon() const { return platoon != kNoPlatoon; }
  bool is_cacc_ads() const { return klass == VehClass::CACC && mode == ControlMode::ADS; }
  double rear() const { return position - length; }
};

}  // namespace mlsim
