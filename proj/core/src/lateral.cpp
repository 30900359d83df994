#include "mlsim/lateral.hpp"

#include <algorithm>
#include <cmath>

namespace mlsim {

namespace {

double bumper_gap(const VehicleState& leader, const VehicleState& follower) {
  return leader.position - leader.length - follower.position;
}

/// Projected acceleration of `subject` behind `leader` (nullable); returns
/// false when the projected gap is non-positive (unsafe configuration).
bool projected(const AccelEvaluator& eval, const VehicleState& subject,
               const VehicleState* leader, double* out) {
  if (!leader) {
    *out = eval.following_accel(subject, nullptr, 0.0);
    return true;
  }
  double gap = bumper_gap(*leader, subject);
  if (gap <= 0.0) return false;
  *out = eval.following_accel(subject, leader, gap);
  return true;
}

}  // namespace

LaneChangeAssessment mobil_assess(const World& world, const VehicleState& ego, int target_lane,
                                  const AccelEvaluator& eval, const LaneChangeParams& params) {
  LaneChangeAssessment out;
  out.lane = target_lane;

  const VehicleState* cur_lead = world.find(world.leader_of(ego.id));
  const VehicleState* old_foll = world.find(world.follower_of(ego.id));
  auto pair = world.around(target_lane, ego.position, ego.id);
  const VehicleState* new_lead = world.find(pair.leader);
  const VehicleState* new_foll = world.find(pair.follower);

  // Current accelerations, all from the same frozen state.
  double a_ego = 0.0, a_new_foll = 0.0, a_old_foll = 0.0;
  if (!projected(eval, ego, cur_lead, &a_ego)) a_ego = -kMaxBrake;
  if (new_foll && !projected(eval, *new_foll, new_lead, &a_new_foll)) a_new_foll = -kMaxBrake;
  if (old_foll && !projected(eval, *old_foll, &ego, &a_old_foll)) a_old_foll = -kMaxBrake;

  // Post-change projections.
  double at_ego = 0.0, at_new_foll = 0.0, at_old_foll = 0.0;
  bool ego_ok = projected(eval, ego, new_lead, &at_ego);
  bool nf_ok = !new_foll || projected(eval, *new_foll, &ego, &at_new_foll);
  bool of_ok = !old_foll || projected(eval, *old_foll, cur_lead, &at_old_foll);

  out.ego_new_accel = at_ego;
  out.new_follower_accel = new_foll ? at_new_foll : 0.0;
  out.old_follower_accel = old_foll ? at_old_foll : 0.0;

  double gain_ego = at_ego - a_ego;
  double gain_new = new_foll ? (at_new_foll - a_new_foll) : 0.0;
  double gain_old = old_foll ? (at_old_foll - a_old_foll) : 0.0;
  out.incentive = gain_ego + params.politeness * (gain_new + gain_old);

  bool gap_ok = ego_ok && nf_ok && of_ok;
  if (new_lead && bumper_gap(*new_lead, ego) <= 0.0) gap_ok = false;
  if (new_foll && bumper_gap(ego, *new_foll) <= 0.0) gap_ok = false;
  out.safe = gap_ok && (!new_foll || at_new_foll >= -params.safe_decel);
  out.pass = out.safe && out.incentive > params.threshold;
  return out;
}

std::optional<LaneChangeAssessment> select_cluster_target(
    const std::vector<LaneChangeAssessment>& passing, int ego_lane, bool select_max) {
  std::optional<LaneChangeAssessment> best;
  for (const auto& a : passing) {
    if (!best) {
      best = a;
      continue;
    }
    bool better;
    if (a.incentive != best->incentive) {
      better = select_max ? a.incentive > best->incentive : a.incentive < best->incentive;
    } else if ((a.lane == ego_lane) != (best->lane == ego_lane)) {
      better = a.lane == ego_lane;  // prefer no lateral move
    } else {
      better = a.lane > best->lane;  // then the leftmost lane
    }
    if (better) best = a;
  }
  return best;
}

MergeDecision assess_mandatory_merge(const World& world, const VehicleState& ego,
                                     int target_lane, double urgency,
                                     const AccelEvaluator& eval, const LaneChangeParams& params,
                                     double ego_comfort_decel) {
  MergeDecision out;
  auto pair = world.around(target_lane, ego.position, ego.id);
  const VehicleState* new_lead = world.find(pair.leader);
  const VehicleState* new_foll = world.find(pair.follower);

  if (new_lead && bumper_gap(*new_lead, ego) <= 0.0) return out;
  if (new_foll && bumper_gap(ego, *new_foll) <= 0.0) return out;

  double a_ego = 0.0;
  if (!projected(eval, ego, new_lead, &a_ego)) return out;
  double a_foll = 0.0;
  if (new_foll && !projected(eval, *new_foll, &ego, &a_foll)) return out;

  double relaxed = params.safe_decel * (1.0 + 0.5 * std::clamp(urgency, 0.0, 1.0));
  out.ego_accel = a_ego;
  out.follower_accel = new_foll ? a_foll : 0.0;
  out.accept = a_ego >= -ego_comfort_decel && (!new_foll || a_foll >= -relaxed);
  return out;
}

}  // namespace mlsim
