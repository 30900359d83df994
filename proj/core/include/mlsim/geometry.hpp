#pragma once

#include <string>
#include <vector>

#include "mlsim/types.hpp"

namespace mlsim {

/// One interchange: an off-ramp (diverge) followed by an on-ramp (merge).
/// Positions are meters along the mainline. The on-ramp carries a parallel
/// acceleration lane [on_ramp_pos, on_ramp_pos + merge_length] that vehicles
/// must leave into lane 0 before its hard end.
struct Interchange {
  std::string zone;       // demand zone id of the on-ramp origin (e.g. "Z2")
  double off_ramp_pos = 0.0;
  double on_ramp_pos = 0.0;
  double merge_length = 300.0;
};

/// DLA access zone on the managed-lane boundary (crossings between lane
/// lanes-2 and lane lanes-1 are legal only inside a zone).
struct AccessZone {
  double start = 0.0;
  double end = 0.0;
};

struct NetworkGeometry {
  double mainline_length = 8000.0;  // m
  int lanes = 4;                    // lane 0 = rightmost, lanes-1 = leftmost (ML)
  double diverge_length = 500.0;    // m of pre-positioning ahead of an off-ramp
  std::vector<Interchange> interchanges;
  std::vector<AccessZone> access_zones;  // populated under DLA only

  int managed_lane() const { return lanes - 1; }

  /// Aux (acceleration) lane ids are negative: ramp r -> -(r+1).
  int aux_lane_id(int ramp_index) const { return -(ramp_index + 1); }
  bool is_aux_lane(int lane) const { return lane < 0; }
  int ramp_index_of_aux(int lane) const { return -lane - 1; }

  bool in_access_zone(double position) const {
    for (const auto& z : access_zones) {
      if (position >= z.start && position <= z.end) return true;
    }
    return false;
  }
};

/// The paper's synthetic segment: 8 km, 4 lanes, two interchanges.
NetworkGeometry default_geometry();

/// Which lanes a vehicle class may occupy under a strategy. Only the managed
/// lane is restricted; all other mainline lanes (and aux lanes) are open.
bool lane_eligibility(Strategy strategy, VehClass klass, int lane, const NetworkGeometry& g);

/// Builds DLA access zones: one zone per managed-lane entry/exit need,
/// 333 m per lane change required between the attaching lane and the managed
/// lane. Entry zones start at the mainline origin and at each on-ramp's merge
/// end; exit zones end at each off-ramp. Overlapping zones are merged.
std::vector<AccessZone> access_zone_builder(const NetworkGeometry& g, int entry_lane);

/// True when a single lane change from `from` to `to` at `position` is
/// permitted for the class under the strategy (eligibility plus, under DLA,
/// the managed-lane boundary-crossing zone rule).
bool lane_change_allowed(Strategy strategy, VehClass klass, int from, int to, double position,
                         const NetworkGeometry& g);

}  // namespace mlsim
