#pragma once

#include <optional>
#include <vector>

#include "mlsim/longitudinal.hpp"
#include "mlsim/platooning.hpp"
#include "mlsim/world.hpp"

namespace mlsim {

struct LaneChangeParams {
  double politeness = 0.9;      // p
  double threshold = 1.0;       // delta-accel threshold, m/s^2
  double safe_decel = 4.0;      // max imposed deceleration on the new follower
  bool cluster_select_max = false;  // sensitivity flag: conventional max rule
};

/// One MOBIL evaluation of a candidate lane. The incentive is the left-hand
/// side of the lane-change criterion; pass requires it to exceed the
/// threshold and the new follower's projected deceleration to stay bounded.
struct LaneChangeAssessment {
  int lane = 0;
  bool eligible = true;   // class/strategy eligibility of the target lane
  bool pass = false;
  bool safe = false;      // projected gaps positive, new-follower bound holds
  double incentive = 0.0;
  double ego_new_accel = 0.0;
  double new_follower_accel = 0.0;
  double old_follower_accel = 0.0;
};

/// Everything the MOBIL projection needs to evaluate a vehicle's E-IDM
/// acceleration against an arbitrary predecessor. The time gap is the
/// vehicle's effective gap policy toward that predecessor.
class AccelEvaluator {
public:
  virtual ~AccelEvaluator() = default;
  /// Acceleration of `subject` if its direct leader were `leader` (null for
  /// free road) at the given bumper gap.
  virtual double following_accel(const VehicleState& subject, const VehicleState* leader,
                                 double gap) const = 0;
};

/// MOBIL incentive for moving `ego` into `target_lane`:
/// (a~ - a) + p * [(a~_n - a_n) + (a~_o - a_o)] with E-IDM projections;
/// missing neighbors contribute zero.
LaneChangeAssessment mobil_assess(const World& world, const VehicleState& ego, int target_lane,
                                  const AccelEvaluator& eval, const LaneChangeParams& params);

/// Among passing clustering candidates, picks the one with the smallest
/// incentive (least impact). Ties break toward the ego lane (no lateral
/// move), then toward the leftmost lane. With cluster_select_max set, the
/// conventional largest-incentive rule is used instead.
std::optional<LaneChangeAssessment> select_cluster_target(
    const std::vector<LaneChangeAssessment>& passing, int ego_lane, bool select_max = false);

/// Gap-acceptance outcome for a mandatory move (ramp merge, pre-positioning
/// for an exit, managed-lane access).
struct MergeDecision {
  bool accept = false;
  double ego_accel = 0.0;           // ego's projected accel behind the new leader
  double follower_accel = 0.0;      // new follower's projected accel behind ego
};

/// Accept iff the projected new-follower deceleration stays within the
/// urgency-relaxed bound and ego's own required deceleration stays within
/// its comfortable braking. Urgency in [0,1] linearly relaxes safe_decel to
/// 1.5x at the zone end.
MergeDecision assess_mandatory_merge(const World& world, const VehicleState& ego,
                                     int target_lane, double urgency,
                                     const AccelEvaluator& eval, const LaneChangeParams& params,
                                     double ego_comfort_decel);

}  // namespace mlsim
