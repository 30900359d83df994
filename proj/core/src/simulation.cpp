#include "mlsim/simulation.hpp"

#include <algorithm>
#include <cmath>

namespace mlsim {

namespace {
constexpr double kStarvedSpeed = 0.3;      // m/s: "stopped" at the lane end
constexpr double kStarvedWindow = 25.0;    // m from the merge-lane end
constexpr double kPrevailingWindow = 200.0;  // m lookahead for entry speed
constexpr double kMandatoryCooldown = 1.0;   // s between executed mandatory moves
constexpr double kEntryHeadwayFactor = 0.9;  // s of spacing required to spawn
}  // namespace

std::string_view to_string(LaneChangeKind k) {
  switch (k) {
    case LaneChangeKind::Discretionary: return "DISCRETIONARY";
    case LaneChangeKind::Cluster: return "CLUSTER";
    case LaneChangeKind::Seek: return "SEEK";
    case LaneChangeKind::Merge: return "MERGE";
    case LaneChangeKind::Diverge: return "DIVERGE";
  }
  return "?";
}

/// AccelEvaluator adapter so the lateral module can project E-IDM
/// accelerations without depending on Simulation.
class Simulation::Evaluator : public AccelEvaluator {
public:
  explicit Evaluator(const Simulation& sim) : sim_(sim) {}
  double following_accel(const VehicleState& subject, const VehicleState* leader,
                         double gap) const override {
    return sim_.following_accel(subject, leader, gap);
  }

private:
  const Simulation& sim_;
};

Simulation::Simulation(const ScenarioConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      world_(cfg.geometry, cfg.timestep),
      ledger_(cfg.geometry.mainline_length / cfg.free_flow_speed),
      comms_rng_(mix_seed(seed, 2)) {
  cfg_.finalize();
  lc_period_steps_ = std::max(1, static_cast<int>(std::lround(cfg_.lc_decision_period / cfg_.timestep)));
  next_sample_time_ = cfg_.warmup;

  bool fold_hov = cfg_.strategy == Strategy::UML || cfg_.strategy == Strategy::DL ||
                  cfg_.strategy == Strategy::DLA;

  // Origin 0 is the mainline entry; origins 1.. are the on-ramps in
  // interchange order. Downstream off-ramps are those strictly ahead of the
  // origin's attach point.
  std::vector<ArrivalGenerator::OriginSpec> origins;
  auto zones = cfg_.demand.zones();
  auto is_ramp_zone = [&](const std::string& z) {
    for (const auto& ic : cfg_.geometry.interchanges) {
      if (ic.zone == z) return true;
    }
    return false;
  };
  for (const auto& z : zones) {
    if (is_ramp_zone(z)) continue;
    ArrivalGenerator::OriginSpec main;
    main.zone = z;
    main.origin_index = 0;
    for (std::size_t r = 0; r < cfg_.geometry.interchanges.size(); ++r) {
      main.downstream_offramps.push_back(static_cast<int>(r));
    }
    origins.push_back(main);
    break;  // a single mainline origin
  }
  for (std::size_t r = 0; r < cfg_.geometry.interchanges.size(); ++r) {
    const auto& ic = cfg_.geometry.interchanges[r];
    ArrivalGenerator::OriginSpec spec;
    spec.zone = ic.zone;
    spec.origin_index = static_cast<int>(r) + 1;
    for (std::size_t q = 0; q < cfg_.geometry.interchanges.size(); ++q) {
      if (cfg_.geometry.interchanges[q].off_ramp_pos >
          ic.on_ramp_pos + ic.merge_length) {
        spec.downstream_offramps.push_back(static_cast<int>(q));
      }
    }
    origins.push_back(spec);
  }
  // Queues are indexed by origin index (0 = mainline, r+1 = ramp r), which
  // is fixed even when the demand table omits some origins.
  entry_queues_.resize(cfg_.geometry.interchanges.size() + 1);
  arrivals_ = std::make_unique<ArrivalGenerator>(
      cfg_.demand, std::move(origins), cfg_.market_penetration, fold_hov, cfg_.offramp_split,
      mix_seed(seed, 1), mix_seed(seed, 3), cfg_.cacc.desired_speed);

  if (!cfg_.vt_micro_coeffs_path.empty()) {
    vt_micro_ = load_vt_micro(cfg_.vt_micro_coeffs_path);
    ledger_.set_fuel_enabled(true);
  }
}

Simulation::~Simulation() = default;

double Simulation::time() const { return world_.clock(); }

void Simulation::set_platoon_event_sink(PlatoonEventSink sink) {
  platoons_.set_event_sink(std::move(sink));
}

VehicleId Simulation::spawn_vehicle(VehClass klass, int lane, double position, double speed,
                                    double desired_speed, int dest_offramp) {
  VehicleState v;
  v.klass = klass;
  v.lane = lane;
  v.position = position;
  v.speed = speed;
  v.accel = 0.0;
  v.length = cfg_.vehicle_length;
  v.desired_speed = desired_speed;
  v.fallback_desired_speed = desired_speed;
  v.dest_offramp = dest_offramp;
  v.origin = 0;
  v.entry_time = world_.clock();
  return world_.spawn(v);
}

IdmParams Simulation::effective_params(const VehicleState& v, double time_gap) const {
  if (v.klass == VehClass::CACC) {
    if (v.mode == ControlMode::ADS) {
      IdmParams p = cfg_.cacc;
      p.time_gap = time_gap;
      return p;
    }
    IdmParams p = cfg_.human;
    p.desired_speed = v.fallback_desired_speed;
    p.time_gap = cfg_.platoon.t_inter;
    return p;
  }
  IdmParams p = cfg_.human;
  p.desired_speed = v.desired_speed;
  return p;
}

double Simulation::effective_time_gap(const VehicleState& subject,
                                      const VehicleState* leader) const {
  if (subject.klass != VehClass::CACC) return cfg_.human.time_gap;
  if (subject.mode != ControlMode::ADS) return cfg_.platoon.t_inter;
  return gap_policy(world_, platoons_, subject, leader ? leader->id : kNoVehicle, cfg_.platoon);
}

double Simulation::comfort_decel_of(const VehicleState& v) const {
  return v.is_cacc_ads() ? cfg_.cacc.comfort_decel : cfg_.human.comfort_decel;
}

double Simulation::following_accel(const VehicleState& subject, const VehicleState* leader,
                                   double gap) const {
  double time_gap = effective_time_gap(subject, leader);
  IdmParams p = effective_params(subject, time_gap);
  if (subject.is_cacc_ads()) {
    double a;
    if (leader) {
      // Overspeed margin applies only while closing on a platooning target
      // (join approach, or a member tightening to the intra gap).
      bool closing = (subject.join_target != kNoVehicle && leader->id == subject.join_target) ||
                     time_gap == cfg_.platoon.t_intra;
      double boost = closing ? cfg_.platoon.catchup_speed_boost : 0.0;
      a = cacc_following_accel(subject.speed, leader->speed, leader->accel, gap, p, boost);
    } else {
      a = free_accel(subject.speed, p);
    }
    return clamp_commanded(a, p);
  }
  double a = leader ? eidm_accel(subject.speed, leader->speed, leader->accel, gap, p)
                    : free_accel(subject.speed, p);
  return clamp_commanded(a, p);
}

void Simulation::phase_comms() {
  for (auto& v : world_.vehicles()) {
    v.link_exists = false;
    v.reception_ok = false;
    if (v.klass != VehClass::CACC) continue;
    VehicleId lead_id = world_.leader_of(v.id);
    if (lead_id == kNoVehicle) continue;
    const VehicleState* lead = world_.find(lead_id);
    if (!lead || lead->klass != VehClass::CACC) continue;
    v.link_exists = true;
    double distance = lead->position - v.position;
    v.reception_ok = sample_link(cfg_.channel, comms_rng_, distance);
  }
}

void Simulation::phase_platooning() {
  const double t = world_.clock();
  const auto& pp = cfg_.platoon;

  // Fallback loop: consume this step's reception outcome wherever the
  // behavior depends on the predecessor link. Monitoring flags are
  // snapshotted first so one follower's takeover cannot erase a sibling's
  // loss history within the same step.
  std::vector<std::pair<VehicleId, bool>> monitored_flags;
  for (const auto& v : world_.vehicles()) {
    if (v.klass != VehClass::CACC) continue;
    bool monitored = false;
    if (v.mode == ControlMode::ADS) {
      // Only a platoon follower's (or pending rear's) predecessor link is
      // behaviorally consumed; losing a distant clustering candidate's
      // beacons aborts nothing but the join handshake itself.
      if (v.in_platoon() && v.platoon_depth >= 2) {
        const PlatoonRecord* rec = platoons_.find(v.platoon);
        if (rec && v.platoon_depth <= rec->members.size()) {
          monitored = rec->members[v.platoon_depth - 2] == world_.leader_of(v.id);
        }
      }
    } else {
      monitored = v.link_exists;  // recovery listens to any CACC predecessor
    }
    monitored_flags.emplace_back(v.id, monitored);
  }
  const int rejoin_steps =
      std::max(1, static_cast<int>(std::lround(pp.rejoin_hold / cfg_.timestep)));
  for (auto [id, monitored] : monitored_flags) {
    VehicleState* v = world_.find(id);
    if (!v) continue;
    FallbackTransition tr = fallback_step(v->mode, v->loss_streak, v->success_streak, monitored,
                                          v->reception_ok, pp.fallback_loss_threshold,
                                          rejoin_steps);
    if (tr == FallbackTransition::EnterFallback) {
      ++fallback_events_;
      v->join_target = kNoVehicle;
      PlatoonId pid = v->platoon;
      if (pid != kNoPlatoon) platoons_.remove_member(world_, v->id, t, pp);
      platoons_.emit_external({t, PlatoonEventKind::Fallback, pid, v->id, 0});
    } else if (tr == FallbackTransition::RestoreAds) {
      platoons_.emit_external({t, PlatoonEventKind::Restore, kNoVehicle, v->id, 0});
    }
  }

  platoons_.integrity_check(world_, t, pp);

  // Free-agent clustering (same-lane approach/join part).
  for (auto& v : world_.vehicles()) {
    if (!v.is_cacc_ads() || v.in_platoon()) continue;
    FreeAgentPlan plan = plan_free_agent(world_, platoons_, v, pp, cfg_.cacc);
    switch (plan.action) {
      case FreeAgentAction::None:
        v.join_target = kNoVehicle;
        break;
      case FreeAgentAction::Approach:
        v.join_target = plan.target;
        break;
      case FreeAgentAction::JoinPlatoon: {
        JoinResult r = platoons_.join_rear(world_, plan.platoon, v.id, true, t, pp);
        if (r == JoinResult::Ok) v.join_target = kNoVehicle;
        break;
      }
      case FreeAgentAction::PairUp: {
        VehicleState* front = world_.find(plan.target);
        if (front && !front->in_platoon() && front->is_cacc_ads()) {
          platoons_.form_pending(world_, plan.target, v.id, t);
          v.join_target = kNoVehicle;
        }
        break;
      }
    }
  }
}

bool Simulation::diverge_pending(const VehicleState& v, double* urgency,
                                 int* changes_left) const {
  if (v.dest_offramp < 0 || v.lane <= 0 || world_.geometry().is_aux_lane(v.lane)) return false;
  const auto& ic = cfg_.geometry.interchanges[static_cast<std::size_t>(v.dest_offramp)];
  double dist = ic.off_ramp_pos - v.position;
  if (dist < 0.0) return false;
  double window = cfg_.geometry.diverge_length * v.lane;
  if (dist > window) return false;
  if (urgency) *urgency = 1.0 - dist / window;
  if (changes_left) *changes_left = v.lane;
  return true;
}

bool Simulation::exiting_soon(const VehicleState& v) const {
  if (v.dest_offramp < 0) return false;
  const auto& ic = cfg_.geometry.interchanges[static_cast<std::size_t>(v.dest_offramp)];
  double dist = ic.off_ramp_pos - v.position;
  return dist >= 0.0 &&
         dist <= cfg_.geometry.diverge_length * (cfg_.geometry.lanes + 1);
}

std::optional<VehicleId> Simulation::cluster_candidate(const VehicleState& ego, int lane) const {
  auto pair = world_.around(lane, ego.position, ego.id);
  if (pair.leader == kNoVehicle) return std::nullopt;
  const VehicleState* cand = world_.find(pair.leader);
  if (!cand || cand->klass != VehClass::CACC) return std::nullopt;
  if (cand->position - ego.position > cfg_.platoon.dsrc_range) return std::nullopt;
  if (cand->in_platoon()) {
    const PlatoonRecord* rec = platoons_.find(cand->platoon);
    if (!rec || rec->rear() != cand->id || rec->size() >= cfg_.platoon.max_size) {
      return std::nullopt;
    }
    return cand->id;
  }
  return cand->is_cacc_ads() ? std::optional<VehicleId>(cand->id) : std::nullopt;
}

void Simulation::collect_intents(std::vector<Intent>& intents) {
  const double t = world_.clock();
  const auto& g = cfg_.geometry;
  Evaluator eval(*this);

  for (const auto& v : world_.vehicles()) {
    if (g.is_aux_lane(v.lane)) {
      if (t - v.last_lane_change < kMandatoryCooldown) continue;
      const auto& ic = g.interchanges[static_cast<std::size_t>(g.ramp_index_of_aux(v.lane))];
      Intent in;
      in.vehicle = v.id;
      in.target_lane = 0;
      in.kind = LaneChangeKind::Merge;
      in.urgency = std::clamp((v.position - ic.on_ramp_pos) / ic.merge_length, 0.0, 1.0);
      in.position = v.position;
      intents.push_back(in);
      continue;
    }

    double urgency = 0.0;
    if (diverge_pending(v, &urgency, nullptr)) {
      if (t - v.last_lane_change < kMandatoryCooldown) continue;
      if (!lane_change_allowed(cfg_.strategy, v.klass, v.lane, v.lane - 1, v.position, g)) {
        continue;
      }
      Intent in;
      in.vehicle = v.id;
      in.target_lane = v.lane - 1;
      in.kind = LaneChangeKind::Diverge;
      in.urgency = urgency;
      in.position = v.position;
      intents.push_back(in);
      continue;
    }

    // Discretionary-frequency decisions: staggered by id, one per second.
    if ((step_index_ + v.id) % static_cast<std::uint64_t>(lc_period_steps_) != 0) continue;
    if (t - v.last_lane_change < cfg_.lc_cooldown) continue;
    if (v.in_platoon()) continue;  // members hold their lane

    bool free_cacc = v.is_cacc_ads();
    if (free_cacc && v.join_target != kNoVehicle) continue;  // busy approaching

    if (free_cacc) {
      // Clustering: adjacent-lane candidates, smallest passing incentive.
      std::vector<LaneChangeAssessment> passing;
      std::vector<VehicleId> targets;
      for (auto lane_opt : {world_.left_lane(v.lane), world_.right_lane(v.lane)}) {
        if (!lane_opt) continue;
        if (!lane_change_allowed(cfg_.strategy, v.klass, v.lane, *lane_opt, v.position, g)) {
          continue;
        }
        auto cand = cluster_candidate(v, *lane_opt);
        if (!cand) continue;
        LaneChangeAssessment a = mobil_assess(world_, v, *lane_opt, eval, cfg_.lane_change);
        if (a.pass) {
          passing.push_back(a);
          targets.push_back(*cand);
        }
      }
      if (!passing.empty()) {
        auto choice =
            select_cluster_target(passing, v.lane, cfg_.lane_change.cluster_select_max);
        Intent in;
        in.vehicle = v.id;
        in.target_lane = choice->lane;
        in.kind = LaneChangeKind::Cluster;
        in.incentive = choice->incentive;
        in.position = v.position;
        for (std::size_t i = 0; i < passing.size(); ++i) {
          if (passing[i].lane == choice->lane) in.cluster_target = targets[i];
        }
        intents.push_back(in);
        continue;
      }

      // Managed-lane seeking under ML strategies: safety-gated drift left.
      bool ml_strategy = cfg_.strategy == Strategy::MML || cfg_.strategy == Strategy::DL ||
                         cfg_.strategy == Strategy::DLA;
      if (ml_strategy && v.lane < g.managed_lane() && !exiting_soon(v)) {
        int target = v.lane + 1;
        if (lane_change_allowed(cfg_.strategy, v.klass, v.lane, target, v.position, g)) {
          LaneChangeAssessment a = mobil_assess(world_, v, target, eval, cfg_.lane_change);
          if (a.safe && a.ego_new_accel >= -comfort_decel_of(v)) {
            Intent in;
            in.vehicle = v.id;
            in.target_lane = target;
            in.kind = LaneChangeKind::Seek;
            in.incentive = a.incentive;
            in.position = v.position;
            intents.push_back(in);
            continue;
          }
        }
      }
    }

    // Plain discretionary MOBIL (humans, fallback CACC, and free CACC with
    // nothing better to do): best passing adjacent lane.
    std::optional<LaneChangeAssessment> best;
    for (auto lane_opt : {world_.left_lane(v.lane), world_.right_lane(v.lane)}) {
      if (!lane_opt) continue;
      if (!lane_change_allowed(cfg_.strategy, v.klass, v.lane, *lane_opt, v.position, g)) {
        continue;
      }
      LaneChangeAssessment a = mobil_assess(world_, v, *lane_opt, eval, cfg_.lane_change);
      if (a.pass && (!best || a.incentive > best->incentive)) best = a;
    }
    if (best) {
      Intent in;
      in.vehicle = v.id;
      in.target_lane = best->lane;
      in.kind = LaneChangeKind::Discretionary;
      in.incentive = best->incentive;
      in.position = v.position;
      intents.push_back(in);
    }
  }
}

void Simulation::execute_intents(std::vector<Intent>& intents) {
  const double t = world_.clock();
  Evaluator eval(*this);
  // Downstream first; a later (upstream) intent is re-validated against the
  // already-updated world, so conflicting movers upstream yield.
  std::sort(intents.begin(), intents.end(), [](const Intent& a, const Intent& b) {
    if (a.position != b.position) return a.position > b.position;
    return a.vehicle < b.vehicle;
  });

  for (const Intent& in : intents) {
    VehicleState* v = world_.find(in.vehicle);
    if (!v || v->lane == in.target_lane) continue;
    if (!lane_change_allowed(cfg_.strategy, v->klass, v->lane, in.target_lane, v->position,
                             cfg_.geometry)) {
      continue;
    }

    bool ok = false;
    double incentive = in.incentive;
    switch (in.kind) {
      case LaneChangeKind::Merge:
      case LaneChangeKind::Diverge: {
        MergeDecision d = assess_mandatory_merge(world_, *v, in.target_lane, in.urgency, eval,
                                                 cfg_.lane_change, comfort_decel_of(*v));
        ok = d.accept;
        incentive = 0.0;
        break;
      }
      case LaneChangeKind::Cluster:
      case LaneChangeKind::Discretionary: {
        LaneChangeAssessment a = mobil_assess(world_, *v, in.target_lane, eval, cfg_.lane_change);
        ok = a.pass;
        incentive = a.incentive;
        break;
      }
      case LaneChangeKind::Seek: {
        LaneChangeAssessment a = mobil_assess(world_, *v, in.target_lane, eval, cfg_.lane_change);
        ok = a.safe && a.ego_new_accel >= -comfort_decel_of(*v);
        incentive = a.incentive;
        break;
      }
    }
    if (!ok) continue;

    int from = v->lane;
    if (v->in_platoon()) {
      platoons_.remove_member(world_, v->id, t, cfg_.platoon);
    }
    world_.change_lane(v->id, in.target_lane);
    v->last_lane_change = t;
    v->starved_flag = false;
    if (in.kind == LaneChangeKind::Cluster && in.cluster_target != kNoVehicle) {
      v->join_target = in.cluster_target;
    }
    if (v->join_target != kNoVehicle) {
      const VehicleState* tgt = world_.find(v->join_target);
      if (!tgt || tgt->lane != v->lane) v->join_target = kNoVehicle;
    }
    log_lane_change(*v, in.kind, from, in.target_lane, incentive);
  }
}

void Simulation::phase_lane_changes() {
  std::vector<Intent> intents;
  collect_intents(intents);
  execute_intents(intents);
  // Cut-ins from this step's moves must not leave a platoon inconsistent.
  platoons_.integrity_check(world_, world_.clock(), cfg_.platoon);
}

void Simulation::phase_accelerations() {
  const auto& g = cfg_.geometry;
  auto vehicles = world_.vehicles();
  accel_buffer_.resize(vehicles.size());

  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    const VehicleState& v = vehicles[i];
    VehicleId lead_id = world_.leader_of(v.id);
    const VehicleState* lead = world_.find(lead_id);
    double a;
    if (lead) {
      double gap = lead->position - lead->length - v.position;
      if (gap <= 0.0) {
        throw SimulationFault("non-positive gap entering acceleration phase");
      }
      a = following_accel(v, lead, gap);
    } else {
      a = following_accel(v, nullptr, 0.0);
    }

    if (g.is_aux_lane(v.lane)) {
      const auto& ic = g.interchanges[static_cast<std::size_t>(g.ramp_index_of_aux(v.lane))];
      double zone_end = ic.on_ramp_pos + ic.merge_length;
      // Virtual stationary wall at the hard end of the acceleration lane.
      IdmParams p = effective_params(v, effective_time_gap(v, nullptr));
      double wall_gap = zone_end + p.min_gap - v.position;
      if (wall_gap > 0.0) {
        double a_wall = v.is_cacc_ads()
                            ? cacc_following_accel(v.speed, 0.0, 0.0, wall_gap, p)
                            : eidm_accel(v.speed, 0.0, 0.0, wall_gap, p);
        a = std::min(a, clamp_commanded(a_wall, p));
      } else {
        a = std::min(a, -kMaxBrake);
      }
      // Couple to the target-lane flow (bounded by comfortable braking) so
      // the merger slides along gaps instead of racing the queue.
      auto pair = world_.around(0, v.position, v.id);
      if (const VehicleState* tl = world_.find(pair.leader)) {
        double tgap = tl->position - tl->length - v.position;
        if (tgap > 0.0) {
          double couple = following_accel(v, tl, tgap);
          a = std::min(a, std::max(couple, -comfort_decel_of(v)));
        }
      }
    } else {
      double urgency = 0.0;
      if (diverge_pending(v, &urgency, nullptr) && urgency > 0.3) {
        auto pair = world_.around(v.lane - 1, v.position, v.id);
        if (const VehicleState* tl = world_.find(pair.leader)) {
          double tgap = tl->position - tl->length - v.position;
          if (tgap > 0.0) {
            double couple = following_accel(v, tl, tgap);
            a = std::min(a, std::max(couple, -comfort_decel_of(v)));
          }
        }
      }
    }
    accel_buffer_[i] = a;
  }
  for (std::size_t i = 0; i < vehicles.size(); ++i) vehicles[i].accel = accel_buffer_[i];
}

void Simulation::accumulate_motion() {
  if (world_.clock() <= cfg_.warmup) return;
  double meters = 0.0;
  for (const auto& v : world_.vehicles()) meters += v.speed * cfg_.timestep;
  ledger_.add_distance_time(meters / 1000.0,
                            static_cast<double>(world_.size()) * cfg_.timestep / 3600.0);
}

void Simulation::remove_vehicle(VehicleId id) {
  VehicleState* v = world_.find(id);
  if (v && v->in_platoon()) {
    platoons_.remove_member(world_, id, world_.clock(), cfg_.platoon);
  }
  world_.remove(id);
}

void Simulation::phase_exits() {
  const double t = world_.clock();
  const auto& g = cfg_.geometry;
  std::vector<VehicleId> leaving;
  for (auto& v : world_.vehicles()) {
    if (g.is_aux_lane(v.lane)) continue;
    if (v.dest_offramp >= 0) {
      const auto& ic = g.interchanges[static_cast<std::size_t>(v.dest_offramp)];
      if (v.position >= ic.off_ramp_pos) {
        if (v.lane == 0) {
          leaving.push_back(v.id);
          continue;
        }
        v.dest_offramp = -1;  // missed the exit; continue to the sink
        ++missed_exits_;
      }
    }
    if (v.position >= g.mainline_length) {
      leaving.push_back(v.id);
      if (v.origin == 0 && v.entry_time >= cfg_.warmup) {
        ledger_.add_travel_time(v.klass, t - v.entry_time, v.entry_time);
      }
    }
  }
  for (VehicleId id : leaving) remove_vehicle(id);
}

void Simulation::phase_entries() {
  const double t = world_.clock();
  const auto& g = cfg_.geometry;

  arrival_buffer_.clear();
  arrivals_->generate(t - cfg_.timestep, t, arrival_buffer_);
  for (const auto& a : arrival_buffer_) {
    if (arrival_sink_) {
      arrival_sink_({a.time, a.origin, a.klass, a.desired_speed, a.dest_offramp});
    }
    entry_queues_[static_cast<std::size_t>(a.origin)].push_back(a);
  }

  auto try_spawn = [&](const Arrival& a) -> bool {
    double entry_pos;
    std::vector<int> lanes;
    if (a.origin == 0) {
      entry_pos = 0.0;
      for (int l = 0; l < g.lanes; ++l) {
        if (lane_eligibility(cfg_.strategy, a.klass, l, g)) lanes.push_back(l);
      }
    } else {
      int ramp = a.origin - 1;
      entry_pos = g.interchanges[static_cast<std::size_t>(ramp)].on_ramp_pos;
      lanes.push_back(g.aux_lane_id(ramp));
    }
    if (lanes.empty()) return false;

    // Least-occupied eligible lane; ties prefer the larger front gap, then
    // the rightmost lane.
    double occ_window = std::min(1000.0, g.mainline_length / 4.0);
    int best_lane = -1000;
    int best_count = 0;
    double best_gap = 0.0;
    for (int lane : lanes) {
      int count = 0;
      for (VehicleId id : world_.lane_vehicles(lane)) {
        const VehicleState* o = world_.find(id);
        if (o && o->position >= entry_pos && o->position <= entry_pos + occ_window) ++count;
      }
      auto pair = world_.around(lane, entry_pos);
      double front_gap = occ_window;
      if (const VehicleState* lead = world_.find(pair.leader)) {
        front_gap = lead->position - lead->length - entry_pos;
      }
      bool better = best_lane == -1000 || count < best_count ||
                    (count == best_count && front_gap > best_gap + 1e-9);
      if (better) {
        best_lane = lane;
        best_count = count;
        best_gap = front_gap;
      }
    }

    double prevailing = a.desired_speed;
    auto pair = world_.around(best_lane, entry_pos);
    if (const VehicleState* lead = world_.find(pair.leader)) {
      if (lead->position - entry_pos < kPrevailingWindow) prevailing = lead->speed;
    }
    double entry_speed = std::min(a.desired_speed, prevailing);
    if (a.origin != 0) entry_speed = std::min(entry_speed, cfg_.ramp_entry_speed);
    entry_speed = std::max(0.0, entry_speed);

    double needed = cfg_.human.min_gap + kEntryHeadwayFactor * entry_speed;
    if (best_gap < needed) return false;
    if (const VehicleState* foll = world_.find(pair.follower)) {
      // Entry point sits inside traffic only at ramp lanes (queue tail).
      if (entry_pos - cfg_.vehicle_length - foll->position < cfg_.human.min_gap) return false;
    }

    VehicleState v;
    v.klass = a.klass;
    v.lane = best_lane;
    v.position = entry_pos;
    v.speed = entry_speed;
    v.length = cfg_.vehicle_length;
    v.desired_speed = a.desired_speed;
    v.fallback_desired_speed =
        a.klass == VehClass::CACC ? /*pre-drawn human speed*/ a.human_desired_speed
                                  : a.desired_speed;
    v.origin = a.origin;
    v.dest_offramp = a.dest_offramp;
    v.entry_time = t;
    world_.spawn(v);
    return true;
  };

  for (auto& queue : entry_queues_) {
    while (!queue.empty()) {
      if (!try_spawn(queue.front())) break;
      queue.pop_front();
    }
  }
}

void Simulation::phase_metrics() {
  const double t = world_.clock();
  if (t <= cfg_.warmup) return;

  // Starvation audit runs every step so brief stops are not missed.
  const auto& g = cfg_.geometry;
  for (auto& v : world_.vehicles()) {
    if (!g.is_aux_lane(v.lane)) continue;
    const auto& ic = g.interchanges[static_cast<std::size_t>(g.ramp_index_of_aux(v.lane))];
    double zone_end = ic.on_ramp_pos + ic.merge_length;
    if (v.speed < kStarvedSpeed && zone_end - v.position < kStarvedWindow) {
      if (!v.starved_flag) {
        v.starved_flag = true;
        ++merge_starvations_;
      }
    }
  }

  if (t + 1e-9 < next_sample_time_) return;
  next_sample_time_ += cfg_.metrics_sample_period;

  PlatoonTick tick;
  tick.time = t;
  for (const auto& v : world_.vehicles()) {
    if (v.klass == VehClass::CACC) ++tick.cacc_present;
    if (!g.is_aux_lane(v.lane)) ledger_.add_speed_sample(v.speed);
    if (vt_micro_.loaded) {
      double liters =
          vt_micro_.fuel_rate(ms_to_kmh(v.speed), v.accel * 3.6) * cfg_.metrics_sample_period;
      ledger_.add_fuel(liters, cfg_.metrics_sample_period);
    }
  }
  for (const auto& [id, rec] : platoons_.records()) {
    if (!rec.established(cfg_.platoon)) continue;
    ++tick.platoon_count;
    tick.platooned += rec.size();
    for (std::size_t d = 1; d <= rec.members.size(); ++d) {
      ledger_.add_depth_sample(static_cast<int>(d));
    }
  }
  ledger_.add_platoon_tick(tick, cfg_.metrics_sample_period);
}

void Simulation::step() {
  phase_comms();
  phase_platooning();
  phase_lane_changes();
  phase_accelerations();
  world_.integrate();
  accumulate_motion();
  phase_exits();
  phase_entries();
  phase_metrics();
  ++step_index_;
}

void Simulation::run() {
  while (world_.clock() + 1e-9 < cfg_.horizon) step();
}

RunSummary Simulation::summary() {
  ledger_.entered = world_.entered();
  ledger_.exited = world_.exited();
  ledger_.missed_exits = missed_exits_;
  ledger_.merge_starvations = merge_starvations_;
  ledger_.fallback_events = fallback_events_;
  std::uint64_t latent = 0;
  for (const auto& q : entry_queues_) latent += q.size();
  ledger_.latent_unserved = latent;
  return ledger_.summarize();
}

void Simulation::log_lane_change(const VehicleState& v, LaneChangeKind kind, int from, int to,
                                 double incentive) {
  if (!lc_sink_) return;
  LaneChangeEvent e;
  e.time = world_.clock();
  e.vehicle = v.id;
  e.klass = v.klass;
  e.kind = kind;
  e.from_lane = from;
  e.to_lane = to;
  e.position = v.position;
  e.incentive = incentive;
  e.threshold = cfg_.lane_change.threshold;
  if (lc_sink_) lc_sink_(e);
}

}  // namespace mlsim
