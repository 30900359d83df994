#pragma once

#include <deque>
#include <functional>
#include <memory>

#include "mlsim/lateral.hpp"
#include "mlsim/metrics.hpp"
#include "mlsim/scenario.hpp"

namespace mlsim {

enum class LaneChangeKind : std::uint8_t {
  Discretionary,  // MOBIL threshold rule
  Cluster,        // move toward a platooning candidate (smallest-incentive rule)
  Seek,           // managed-lane attraction for free-agent CACC
  Merge,          // mandatory: on-ramp acceleration lane into lane 0
  Diverge         // mandatory: pre-positioning toward lane 0 ahead of an exit
};
std::string_view to_string(LaneChangeKind k);

struct LaneChangeEvent {
  double time = 0.0;
  VehicleId vehicle = kNoVehicle;
  VehClass klass{};
  LaneChangeKind kind{};
  int from_lane = 0;
  int to_lane = 0;
  double position = 0.0;
  double incentive = 0.0;  // Eq.-4 LHS for discretionary/cluster, else 0
  double threshold = 0.0;
};
using LaneChangeEventSink = std::function<void(const LaneChangeEvent&)>;

/// Arrival as generated (pre-spawn); used for demand-stream audits.
struct ArrivalRecord {
  double time = 0.0;
  int origin = 0;
  VehClass klass{};
  double desired_speed = 0.0;
  int dest_offramp = -1;
};
using ArrivalSink = std::function<void(const ArrivalRecord&)>;

/// One replication: owns the world, platoon registry, channel sampling,
/// demand generation and the metrics ledger, and advances everything one
/// fixed 0.1 s step at a time. Strictly sequential; distinct replications
/// are independent.
class Simulation {
public:
  Simulation(const ScenarioConfig& cfg, std::uint64_t seed);
  ~Simulation();

  void step();
  /// Steps until the horizon.
  void run();

  double time() const;
  const World& world() const { return world_; }
  World& world() { return world_; }
  const ScenarioConfig& config() const { return cfg_; }
  const PlatoonRegistry& platoons() const { return platoons_; }
  PlatoonRegistry& platoons() { return platoons_; }
  MetricsLedger& ledger() { return ledger_; }

  /// Summary with run counters synced in.
  RunSummary summary();

  void set_platoon_event_sink(PlatoonEventSink sink);
  void set_lane_change_sink(LaneChangeEventSink sink) { lc_sink_ = std::move(sink); }
  void set_arrival_sink(ArrivalSink sink) { arrival_sink_ = std::move(sink); }

  /// Test helper: inserts a vehicle directly (bypasses demand).
  VehicleId spawn_vehicle(VehClass klass, int lane, double position, double speed,
                          double desired_speed, int dest_offramp = -1);

  /// Effective car-following acceleration of `subject` behind `leader`
  /// (nullptr = free road) at the given bumper gap, per the subject's class,
  /// mode and gap policy toward that leader.
  double following_accel(const VehicleState& subject, const VehicleState* leader,
                         double gap) const;

  std::uint64_t fallback_event_count() const { return fallback_events_; }

private:
  struct Intent {
    VehicleId vehicle = kNoVehicle;
    int target_lane = 0;
    LaneChangeKind kind{};
    double urgency = 0.0;
    double incentive = 0.0;
    VehicleId cluster_target = kNoVehicle;
    double position = 0.0;
  };

  class Evaluator;  // AccelEvaluator adapter over following_accel

  void phase_comms();
  void phase_platooning();
  void phase_lane_changes();
  void collect_intents(std::vector<Intent>& intents);
  void execute_intents(std::vector<Intent>& intents);
  void phase_accelerations();
  void accumulate_motion();
  void phase_exits();
  void phase_entries();
  void phase_metrics();

  IdmParams effective_params(const VehicleState& v, double time_gap) const;
  double effective_time_gap(const VehicleState& subject, const VehicleState* leader) const;
  double comfort_decel_of(const VehicleState& v) const;
  bool diverge_pending(const VehicleState& v, double* urgency, int* changes_left) const;
  bool exiting_soon(const VehicleState& v) const;
  std::optional<VehicleId> cluster_candidate(const VehicleState& ego, int lane) const;
  void remove_vehicle(VehicleId id);
  void log_lane_change(const VehicleState& v, LaneChangeKind kind, int from, int to,
                       double incentive);

  ScenarioConfig cfg_;
  World world_;
  PlatoonRegistry platoons_;
  MetricsLedger ledger_;
  std::unique_ptr<ArrivalGenerator> arrivals_;
  VtMicroModel vt_micro_;
  RngStream comms_rng_;
  std::uint64_t step_index_ = 0;
  int lc_period_steps_ = 10;
  double next_sample_time_ = 0.0;
  std::uint64_t fallback_events_ = 0;
  std::uint64_t missed_exits_ = 0;
  std::uint64_t merge_starvations_ = 0;

  std::vector<std::deque<Arrival>> entry_queues_;  // per origin
  std::vector<Arrival> arrival_buffer_;
  std::vector<double> accel_buffer_;

  LaneChangeEventSink lc_sink_;
  ArrivalSink arrival_sink_;
};

}  // namespace mlsim
