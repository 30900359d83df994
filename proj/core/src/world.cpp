#include "mlsim/world.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mlsim {

World::World(const NetworkGeometry& geometry, double timestep)
    : geometry_(geometry), dt_(timestep) {
  lanes_.resize(static_cast<std::size_t>(geometry_.lanes + geometry_.interchanges.size()));
}

std::size_t World::lane_slot(int lane) const {
  if (lane >= 0) return static_cast<std::size_t>(lane);
  return static_cast<std::size_t>(geometry_.lanes + geometry_.ramp_index_of_aux(lane));
}

std::size_t World::index_of(VehicleId id) const {
  auto it = std::lower_bound(vehicles_.begin(), vehicles_.end(), id,
                             [](const VehicleState& v, VehicleId key) { return v.id < key; });
  if (it == vehicles_.end() || it->id != id) {
    throw SimulationFault("unknown vehicle id " + std::to_string(id));
  }
  return static_cast<std::size_t>(it - vehicles_.begin());
}

const VehicleState* World::find(VehicleId id) const {
  auto it = std::lower_bound(vehicles_.begin(), vehicles_.end(), id,
                             [](const VehicleState& v, VehicleId key) { return v.id < key; });
  return (it != vehicles_.end() && it->id == id) ? &*it : nullptr;
}

VehicleState* World::find(VehicleId id) {
  return const_cast<VehicleState*>(static_cast<const World*>(this)->find(id));
}

void World::insert_into_lane(VehicleId id, int lane) {
  auto& vec = lanes_[lane_slot(lane)];
  double pos = position_of(id);
  auto it = std::lower_bound(vec.begin(), vec.end(), pos, [this](VehicleId v, double p) {
    return position_of(v) < p;
  });
  vec.insert(it, id);
}

void World::erase_from_lane(VehicleId id, int lane) {
  auto& vec = lanes_[lane_slot(lane)];
  auto it = std::find(vec.begin(), vec.end(), id);
  if (it == vec.end()) throw SimulationFault("vehicle missing from lane vector");
  vec.erase(it);
}

VehicleId World::spawn(VehicleState proto) {
  proto.id = next_id_++;
  vehicles_.push_back(proto);  // ids are monotone, so the vector stays sorted
  insert_into_lane(proto.id, proto.lane);
  ++entered_;
  return proto.id;
}

void World::remove(VehicleId id) {
  std::size_t idx = index_of(id);
  erase_from_lane(id, vehicles_[idx].lane);
  vehicles_.erase(vehicles_.begin() + static_cast<std::ptrdiff_t>(idx));
  ++exited_;
}

VehicleId World::leader_of(VehicleId id) const {
  const VehicleState& v = vehicles_[index_of(id)];
  const auto& vec = lanes_[lane_slot(v.lane)];
  auto it = std::lower_bound(vec.begin(), vec.end(), v.position,
                             [this](VehicleId a, double p) { return position_of(a) < p; });
  // it points at the first vehicle with position >= v.position; skip self and
  // exact ties resolved by id order in the vector.
  while (it != vec.end() && *it != id) ++it;
  if (it == vec.end()) return kNoVehicle;
  ++it;
  return it == vec.end() ? kNoVehicle : *it;
}

VehicleId World::follower_of(VehicleId id) const {
  const VehicleState& v = vehicles_[index_of(id)];
  const auto& vec = lanes_[lane_slot(v.lane)];
  auto it = std::lower_bound(vec.begin(), vec.end(), v.position,
                             [this](VehicleId a, double p) { return position_of(a) < p; });
  while (it != vec.end() && *it != id) ++it;
  if (it == vec.end() || it == vec.begin()) return kNoVehicle;
  return *(it - 1);
}

World::LanePair World::around(int lane, double position, VehicleId exclude) const {
  LanePair out;
  std::size_t slot = lane_slot(lane);
  if (slot >= lanes_.size()) return out;
  const auto& vec = lanes_[slot];
  auto it = std::lower_bound(vec.begin(), vec.end(), position,
                             [this](VehicleId a, double p) { return position_of(a) < p; });
  auto fwd = it;
  while (fwd != vec.end() && *fwd == exclude) ++fwd;
  if (fwd != vec.end()) out.leader = *fwd;
  auto back = it;
  while (back != vec.begin()) {
    --back;
    if (*back != exclude) {
      out.follower = *back;
      break;
    }
  }
  return out;
}

std::optional<int> World::left_lane(int lane) const {
  if (geometry_.is_aux_lane(lane)) return 0;
  if (lane + 1 < geometry_.lanes) return lane + 1;
  return std::nullopt;
}

std::optional<int> World::right_lane(int lane) const {
  if (geometry_.is_aux_lane(lane)) return std::nullopt;
  if (lane - 1 >= 0) return lane - 1;
  return std::nullopt;  // aux lanes are not discretionary targets
}

Neighborhood World::neighbors(VehicleId id) const {
  const VehicleState& v = vehicles_[index_of(id)];
  Neighborhood n;
  n.lead_same = leader_of(id);
  n.foll_same = follower_of(id);
  if (auto ll = left_lane(v.lane)) {
    auto pair = around(*ll, v.position, id);
    n.lead_left = pair.leader;
    n.foll_left = pair.follower;
  }
  if (auto rl = right_lane(v.lane)) {
    auto pair = around(*rl, v.position, id);
    n.lead_right = pair.leader;
    n.foll_right = pair.follower;
  }
  return n;
}

void World::change_lane(VehicleId id, int new_lane) {
  VehicleState& v = vehicles_[index_of(id)];
  if (v.lane == new_lane) return;
  erase_from_lane(id, v.lane);
  v.lane = new_lane;
  insert_into_lane(id, new_lane);
}

const std::vector<VehicleId>& World::lane_vehicles(int lane) const {
  return lanes_[lane_slot(lane)];
}

void World::integrate() {
  for (auto& v : vehicles_) {
    if (!std::isfinite(v.accel) || !std::isfinite(v.speed)) {
      std::ostringstream os;
      os << "non-finite kinematics: vehicle " << v.id << " v=" << v.speed << " a=" << v.accel;
      throw SimulationFault(os.str());
    }
    v.speed = std::max(0.0, v.speed + v.accel * dt_);
    v.position += v.speed * dt_;
  }
  clock_ += dt_;
  check_invariants();
}

void World::check_invariants() const {
  for (const auto& vec : lanes_) {
    for (std::size_t i = 1; i < vec.size(); ++i) {
      const VehicleState& rear = vehicles_[index_of(vec[i - 1])];
      const VehicleState& front = vehicles_[index_of(vec[i])];
      double gap = front.position - front.length - rear.position;
      if (gap < -1e-9) {
        std::ostringstream os;
        os << "overlap at t=" << clock_ << " lane=" << front.lane << ": leader id=" << front.id
           << " pos=" << front.position << " v=" << front.speed << " len=" << front.length
           << " | follower id=" << rear.id << " pos=" << rear.position << " v=" << rear.speed
           << " gap=" << gap;
        throw SimulationFault(os.str());
      }
    }
  }
  if (entered_ != exited_ + vehicles_.size()) {
    throw SimulationFault("vehicle conservation violated");
  }
}

Neighborhood neighbors_bruteforce(const World& world, VehicleId id) {
  const VehicleState* v = world.find(id);
  Neighborhood n;
  if (!v) return n;
  auto lf = world.left_lane(v->lane);
  auto rt = world.right_lane(v->lane);
  struct Best {
    VehicleId lead = kNoVehicle, foll = kNoVehicle;
    double lead_pos = 0.0, foll_pos = 0.0;
  };
  Best same, left, right;
  auto consider = [&](Best& b, const VehicleState& o) {
    if (o.position >= v->position) {
      if (b.lead == kNoVehicle || o.position < b.lead_pos) {
        b.lead = o.id;
        b.lead_pos = o.position;
      }
    } else {
      if (b.foll == kNoVehicle || o.position > b.foll_pos) {
        b.foll = o.id;
        b.foll_pos = o.position;
      }
    }
  };
  for (const auto& o : world.vehicles()) {
    if (o.id == id) continue;
    if (o.lane == v->lane) consider(same, o);
    if (lf && o.lane == *lf) consider(left, o);
    if (rt && o.lane == *rt) consider(right, o);
  }
  n.lead_same = same.lead;
  n.foll_same = same.foll;
  n.lead_left = left.lead;
  n.foll_left = left.foll;
  n.lead_right = right.lead;
  n.foll_right = right.foll;
  return n;
}

}  // namespace mlsim
