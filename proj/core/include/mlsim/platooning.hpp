#pragma once

#include <functional>
#include <map>
#include <vector>

#include "mlsim/longitudinal.hpp"
#include "mlsim/world.hpp"

namespace mlsim {

struct PlatoonParams {
  double t_intra = 1.0;   // s, toward a communicating same-platoon predecessor
  double t_inter = 1.2;   // s, toward anything else
  double dsrc_range = 300.0;  // m
  int min_size = 3;           // established at this size; pairs stay PENDING
  int max_size = 7;
  int fallback_loss_threshold = 3;  // consecutive missed receptions
  double rejoin_hold = 2.0;         // s of restored reception before ADS returns
  double join_gap_tol = 0.10;       // fraction of the intra desired gap
  double join_speed_tol = 1.0;      // m/s
  double catchup_speed_boost = 3.0; // m/s extra desired speed during approach
};

/// Ordered membership of one platoon, front to rear. Size 2 is a PENDING
/// pair (never counted as platooned); 3..max_size is established.
struct PlatoonRecord {
  PlatoonId id = kNoPlatoon;
  std::vector<VehicleId> members;
  std::vector<double> joined_at;

  int size() const { return static_cast<int>(members.size()); }
  bool established(const PlatoonParams& p) const { return size() >= p.min_size; }
  VehicleId leader() const { return members.empty() ? kNoVehicle : members.front(); }
  VehicleId rear() const { return members.empty() ? kNoVehicle : members.back(); }
};

enum class PlatoonEventKind : std::uint8_t {
  FormPending, Establish, Join, Split, Dissolve, Fallback, Restore
};
std::string_view to_string(PlatoonEventKind k);

struct PlatoonEvent {
  double time = 0.0;
  PlatoonEventKind kind{};
  PlatoonId platoon = kNoPlatoon;
  VehicleId vehicle = kNoVehicle;
  int size = 0;
};
using PlatoonEventSink = std::function<void(const PlatoonEvent&)>;

enum class JoinResult : std::uint8_t { Ok, Full, NotAdjacent };

/// Platoon bookkeeping. Mutations also update the vehicles' membership
/// fields; iteration order is id-ascending (std::map) for determinism.
class PlatoonRegistry {
public:
  const std::map<PlatoonId, PlatoonRecord>& records() const { return records_; }
  const PlatoonRecord* find(PlatoonId id) const;

  PlatoonId form_pending(World& world, VehicleId front, VehicleId rear, double t);

  /// Rear join; `directly_behind` asserts same-lane adjacency (no non-member
  /// between the joiner and the platoon rear).
  JoinResult join_rear(World& world, PlatoonId id, VehicleId joiner, bool directly_behind,
                       double t, const PlatoonParams& p);

  /// Removes one vehicle (exit, fallback, lane departure) and splits the
  /// remainder per the fragment rules.
  void remove_member(World& world, VehicleId veh, double t, const PlatoonParams& p);

  /// Verifies presence, same-lane and consecutiveness of every platoon;
  /// splits at each breach. Fragments below min_size become PENDING pairs or
  /// dissolve to free agents.
  void integrity_check(World& world, double t, const PlatoonParams& p);

  void set_event_sink(PlatoonEventSink sink) { sink_ = std::move(sink); }

  /// Routes an externally generated event (fallback/restore) through the
  /// same sink as membership events.
  void emit_external(const PlatoonEvent& e) {
    if (sink_) sink_(e);
  }

  int established_member_count(const PlatoonParams& p) const;

private:
  void emit(const PlatoonEvent& e) {
    if (sink_) sink_(e);
  }
  void assign_depths(World& world, PlatoonRecord& rec);
  void clear_membership(World& world, VehicleId veh);
  /// Re-forms a platoon's member runs after breaches; fragments[0] keeps the
  /// id when it stays a group.
  void apply_fragments(World& world, PlatoonId id, const std::vector<std::vector<VehicleId>>& runs,
                       const std::vector<std::vector<double>>& run_times, double t,
                       const PlatoonParams& p);

  std::map<PlatoonId, PlatoonRecord> records_;
  PlatoonId next_id_ = 1;
  PlatoonEventSink sink_;
};

/// Per-vehicle communication fallback state machine (pure; drives the
/// vehicle's mode, loss and success streaks).
enum class FallbackTransition : std::uint8_t { None, EnterFallback, RestoreAds };
FallbackTransition fallback_step(ControlMode& mode, std::uint16_t& loss_streak,
                                 std::uint16_t& success_streak, bool link_monitored,
                                 bool reception_ok, int loss_threshold, int rejoin_steps);

/// Free-agent clustering decision (the same-lane part of the clustering
/// algorithm; adjacent-lane moves go through the lateral module).
enum class FreeAgentAction : std::uint8_t { None, Approach, JoinPlatoon, PairUp };
struct FreeAgentPlan {
  FreeAgentAction action = FreeAgentAction::None;
  VehicleId target = kNoVehicle;   // vehicle to approach / pair with
  PlatoonId platoon = kNoPlatoon;  // platoon to rear-join, if any
};

/// Scans ahead in the ego lane (within DSRC range, no non-CACC vehicle in
/// between) for a joinable platoon rear or another free agent. Join fires
/// only when the gap and speed envelopes hold and this step's reception from
/// the target succeeded.
FreeAgentPlan plan_free_agent(const World& world, const PlatoonRegistry& reg,
                              const VehicleState& ego, const PlatoonParams& p,
                              const IdmParams& cacc);

/// Effective desired time gap for a CACC vehicle toward its current
/// predecessor (gap policy): t_intra only for an ADS vehicle following its
/// own established platoon's predecessor with this step's reception good, or
/// for a joiner in final approach; otherwise t_inter.
double gap_policy(const World& world, const PlatoonRegistry& reg, const VehicleState& ego,
                  VehicleId predecessor, const PlatoonParams& p);

}  // namespace mlsim
