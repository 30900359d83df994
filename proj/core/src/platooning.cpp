#include "mlsim/platooning.hpp"

#include <algorithm>

#include "mlsim/longitudinal.hpp"

namespace mlsim {

std::string_view to_string(PlatoonEventKind k) {
  switch (k) {
    case PlatoonEventKind::FormPending: return "FORM_PENDING";
    case PlatoonEventKind::Establish: return "ESTABLISH";
    case PlatoonEventKind::Join: return "JOIN";
    case PlatoonEventKind::Split: return "SPLIT";
    case PlatoonEventKind::Dissolve: return "DISSOLVE";
    case PlatoonEventKind::Fallback: return "FALLBACK";
    case PlatoonEventKind::Restore: return "RESTORE";
  }
  return "?";
}

const PlatoonRecord* PlatoonRegistry::find(PlatoonId id) const {
  auto it = records_.find(id);
  return it == records_.end() ? nullptr : &it->second;
}

void PlatoonRegistry::assign_depths(World& world, PlatoonRecord& rec) {
  for (std::size_t i = 0; i < rec.members.size(); ++i) {
    VehicleState* v = world.find(rec.members[i]);
    if (!v) throw SimulationFault("platoon member vanished without bookkeeping");
    v->platoon = rec.id;
    v->platoon_depth = static_cast<std::uint16_t>(i + 1);
  }
}

void PlatoonRegistry::clear_membership(World& world, VehicleId veh) {
  if (VehicleState* v = world.find(veh)) {
    v->platoon = kNoPlatoon;
    v->platoon_depth = 0;
  }
}

PlatoonId PlatoonRegistry::form_pending(World& world, VehicleId front, VehicleId rear, double t) {
  PlatoonRecord rec;
  rec.id = next_id_++;
  rec.members = {front, rear};
  rec.joined_at = {t, t};
  assign_depths(world, rec);
  PlatoonId id = rec.id;
  records_.emplace(id, std::move(rec));
  emit({t, PlatoonEventKind::FormPending, id, rear, 2});
  return id;
}

JoinResult PlatoonRegistry::join_rear(World& world, PlatoonId id, VehicleId joiner,
                                      bool directly_behind, double t, const PlatoonParams& p) {
  auto it = records_.find(id);
  if (it == records_.end()) return JoinResult::NotAdjacent;
  PlatoonRecord& rec = it->second;
  if (rec.size() >= p.max_size) return JoinResult::Full;
  if (!directly_behind) return JoinResult::NotAdjacent;
  rec.members.push_back(joiner);
  rec.joined_at.push_back(t);
  assign_depths(world, rec);
  emit({t, PlatoonEventKind::Join, id, joiner, rec.size()});
  if (rec.size() == p.min_size) {
    emit({t, PlatoonEventKind::Establish, id, rec.leader(), rec.size()});
  }
  return JoinResult::Ok;
}

void PlatoonRegistry::apply_fragments(World& world, PlatoonId id,
                                      const std::vector<std::vector<VehicleId>>& runs,
                                      const std::vector<std::vector<double>>& run_times,
                                      double t, const PlatoonParams& p) {
  auto it = records_.find(id);
  bool id_used = false;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& run = runs[i];
    if (run.size() >= 2) {
      if (!id_used) {
        it->second.members = run;
        it->second.joined_at = run_times[i];
        assign_depths(world, it->second);
        id_used = true;
        emit({t, PlatoonEventKind::Split, id, run.front(), static_cast<int>(run.size())});
      } else {
        PlatoonRecord frag;
        frag.id = next_id_++;
        frag.members = run;
        frag.joined_at = run_times[i];
        assign_depths(world, frag);
        PlatoonId fid = frag.id;
        records_.emplace(fid, std::move(frag));
        emit({t, PlatoonEventKind::Split, fid, run.front(), static_cast<int>(run.size())});
      }
    } else {
      for (VehicleId v : run) clear_membership(world, v);
    }
  }
  if (!id_used) {
    emit({t, PlatoonEventKind::Dissolve, id, kNoVehicle, 0});
    records_.erase(it);
  }
  (void)p;
}

void PlatoonRegistry::remove_member(World& world, VehicleId veh, double t,
                                    const PlatoonParams& p) {
  VehicleState* v = world.find(veh);
  PlatoonId pid = kNoPlatoon;
  if (v && v->in_platoon()) {
    pid = v->platoon;
  } else {
    // Vehicle may already be gone from the world (exit); search records.
    for (auto& [id, rec] : records_) {
      if (std::find(rec.members.begin(), rec.members.end(), veh) != rec.members.end()) {
        pid = id;
        break;
      }
    }
  }
  if (pid == kNoPlatoon) return;
  auto it = records_.find(pid);
  if (it == records_.end()) return;
  PlatoonRecord& rec = it->second;

  std::vector<std::vector<VehicleId>> runs;
  std::vector<std::vector<double>> times;
  std::vector<VehicleId> cur;
  std::vector<double> cur_t;
  for (std::size_t i = 0; i < rec.members.size(); ++i) {
    if (rec.members[i] == veh) {
      if (!cur.empty()) {
        runs.push_back(cur);
        times.push_back(cur_t);
        cur.clear();
        cur_t.clear();
      }
      continue;
    }
    cur.push_back(rec.members[i]);
    cur_t.push_back(rec.joined_at[i]);
  }
  if (!cur.empty()) {
    runs.push_back(cur);
    times.push_back(cur_t);
  }
  clear_membership(world, veh);
  apply_fragments(world, pid, runs, times, t, p);
}

void PlatoonRegistry::integrity_check(World& world, double t, const PlatoonParams& p) {
  std::vector<PlatoonId> ids;
  ids.reserve(records_.size());
  for (const auto& [id, rec] : records_) ids.push_back(id);

  for (PlatoonId id : ids) {
    auto it = records_.find(id);
    if (it == records_.end()) continue;
    PlatoonRecord& rec = it->second;

    // Break the member list into intact runs: present, same lane as the
    // member ahead, and directly consecutive (no interloper in between).
    std::vector<std::vector<VehicleId>> runs;
    std::vector<std::vector<double>> times;
    std::vector<VehicleId> cur;
    std::vector<double> cur_t;
    const VehicleState* prev = nullptr;
    bool breached = false;
    for (std::size_t i = 0; i < rec.members.size(); ++i) {
      const VehicleState* v = world.find(rec.members[i]);
      if (!v) {  // exited or otherwise gone
        breached = true;
        if (!cur.empty()) {
          runs.push_back(cur);
          times.push_back(cur_t);
          cur.clear();
          cur_t.clear();
        }
        prev = nullptr;
        continue;
      }
      bool contiguous = true;
      if (prev) {
        if (v->lane != prev->lane) {
          contiguous = false;
        } else if (world.follower_of(prev->id) != v->id) {
          contiguous = false;  // cut-in between the two members
        }
      }
      if (!contiguous && !cur.empty()) {
        breached = true;
        runs.push_back(cur);
        times.push_back(cur_t);
        cur.clear();
        cur_t.clear();
      }
      cur.push_back(rec.members[i]);
      cur_t.push_back(rec.joined_at[i]);
      prev = v;
    }
    if (!cur.empty()) {
      runs.push_back(cur);
      times.push_back(cur_t);
    }
    if (breached || runs.size() != 1) {
      apply_fragments(world, id, runs, times, t, p);
    }
  }
}

int PlatoonRegistry::established_member_count(const PlatoonParams& p) const {
  int n = 0;
  for (const auto& [id, rec] : records_) {
    if (rec.established(p)) n += rec.size();
  }
  return n;
}

FallbackTransition fallback_step(ControlMode& mode, std::uint16_t& loss_streak,
                                 std::uint16_t& success_streak, bool link_monitored,
                                 bool reception_ok, int loss_threshold, int rejoin_steps) {
  if (mode == ControlMode::ADS) {
    if (link_monitored && !reception_ok) {
      ++loss_streak;
      if (loss_streak >= loss_threshold) {
        mode = ControlMode::FallbackHuman;
        loss_streak = 0;
        success_streak = 0;
        return FallbackTransition::EnterFallback;
      }
    } else {
      loss_streak = 0;
    }
    return FallbackTransition::None;
  }
  // Fallback: an idle channel (no CACC predecessor to listen to) does not
  // count as evidence of failure.
  if (!link_monitored || reception_ok) {
    ++success_streak;
    if (success_streak >= rejoin_steps) {
      mode = ControlMode::ADS;
      loss_streak = 0;
      success_streak = 0;
      return FallbackTransition::RestoreAds;
    }
  } else {
    success_streak = 0;
  }
  return FallbackTransition::None;
}

FreeAgentPlan plan_free_agent(const World& world, const PlatoonRegistry& reg,
                              const VehicleState& ego, const PlatoonParams& p,
                              const IdmParams& cacc) {
  FreeAgentPlan plan;
  if (!ego.is_cacc_ads() || ego.in_platoon()) return plan;

  // The candidate must be the direct same-lane leader (a non-CACC vehicle in
  // between makes the target unreachable from this lane).
  VehicleId lead_id = world.leader_of(ego.id);
  if (lead_id == kNoVehicle) return plan;
  const VehicleState* lead = world.find(lead_id);
  if (!lead || lead->klass != VehClass::CACC) return plan;
  if (lead->position - ego.position > p.dsrc_range) return plan;

  bool joinable_platoon = false;
  PlatoonId pid = kNoPlatoon;
  if (lead->in_platoon()) {
    const PlatoonRecord* rec = reg.find(lead->platoon);
    if (!rec || rec->rear() != lead_id) return plan;  // mid-platoon, not joinable
    if (rec->size() >= p.max_size) return plan;       // full platoon is not a candidate
    joinable_platoon = true;
    pid = rec->id;
  } else if (!lead->is_cacc_ads()) {
    return plan;  // fallback-mode vehicles do not cluster
  }

  // Join envelope: within 10% of the intra-platoon desired gap and within
  // 1 m/s, and this step's reception from the target succeeded.
  double gap = lead->position - lead->length - ego.position;
  double intra_gap = cacc.min_gap + ego.speed * p.t_intra;
  bool in_envelope = std::abs(gap - intra_gap) < p.join_gap_tol * intra_gap &&
                     std::abs(ego.speed - lead->speed) < p.join_speed_tol;
  if (in_envelope && ego.link_exists && ego.reception_ok) {
    plan.target = lead_id;
    if (joinable_platoon) {
      plan.action = FreeAgentAction::JoinPlatoon;
      plan.platoon = pid;
    } else {
      plan.action = FreeAgentAction::PairUp;
    }
    return plan;
  }
  plan.action = FreeAgentAction::Approach;
  plan.target = lead_id;
  plan.platoon = pid;
  return plan;
}

double gap_policy(const World& world, const PlatoonRegistry& reg, const VehicleState& ego,
                  VehicleId predecessor, const PlatoonParams& p) {
  if (ego.mode != ControlMode::ADS) return p.t_inter;
  if (predecessor == kNoVehicle) return p.t_inter;
  if (ego.in_platoon()) {
    const PlatoonRecord* rec = reg.find(ego.platoon);
    if (rec && rec->established(p) && ego.platoon_depth >= 2) {
      VehicleId expected = rec->members[ego.platoon_depth - 2];
      if (expected == predecessor && ego.reception_ok) return p.t_intra;
    }
    return p.t_inter;
  }
  // Joiner in final approach regulates toward the intra gap.
  if (ego.join_target != kNoVehicle && ego.join_target == predecessor) return p.t_intra;
  (void)world;
  return p.t_inter;
}

}  // namespace mlsim
