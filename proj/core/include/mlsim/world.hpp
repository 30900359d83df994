#pragma once

#include <span>
#include <vector>

#include "mlsim/geometry.hpp"
#include "mlsim/vehicle.hpp"

namespace mlsim {

/// Nearest vehicles around a subject, by position, in its own and the two
/// adjacent lanes. kNoVehicle marks an absent neighbor. "Left" is one lane
/// index higher (toward the managed lane).
struct Neighborhood {
  VehicleId lead_same = kNoVehicle;
  VehicleId foll_same = kNoVehicle;
  VehicleId lead_left = kNoVehicle;
  VehicleId foll_left = kNoVehicle;
  VehicleId lead_right = kNoVehicle;
  VehicleId foll_right = kNoVehicle;
};

/// Vehicle registry plus per-lane position order and the simulation clock.
/// Iteration over vehicles() is id-ascending and deterministic. Per-lane
/// vectors are sorted by position; the no-overtake/no-overlap invariants are
/// re-checked after every integration step.
class World {
public:
  World(const NetworkGeometry& geometry, double timestep);

  double clock() const { return clock_; }
  double dt() const { return dt_; }
  const NetworkGeometry& geometry() const { return geometry_; }

  std::span<const VehicleState> vehicles() const { return {vehicles_.data(), vehicles_.size()}; }
  std::span<VehicleState> vehicles() { return {vehicles_.data(), vehicles_.size()}; }
  std::size_t size() const { return vehicles_.size(); }

  const VehicleState* find(VehicleId id) const;
  VehicleState* find(VehicleId id);

  /// Inserts a vehicle (id assigned here) into its lane. The caller must have
  /// verified spawn spacing.
  VehicleId spawn(VehicleState proto);
  void remove(VehicleId id);

  /// Same-lane nearest ahead / behind.
  VehicleId leader_of(VehicleId id) const;
  VehicleId follower_of(VehicleId id) const;

  /// Nearest ahead (position >= x, excluding `exclude`) and behind (position
  /// < x) in an arbitrary lane; used for lane-change projections.
  struct LanePair {
    VehicleId leader = kNoVehicle;
    VehicleId follower = kNoVehicle;
  };
  LanePair around(int lane, double position, VehicleId exclude = kNoVehicle) const;

  Neighborhood neighbors(VehicleId id) const;

  /// Lane ids adjacent to `lane` (left = toward managed lane). Absent -> no
  /// such lane. Aux lanes adjoin lane 0 on their left and nothing else.
  std::optional<int> left_lane(int lane) const;
  std::optional<int> right_lane(int lane) const;

  void change_lane(VehicleId id, int new_lane);

  const std::vector<VehicleId>& lane_vehicles(int lane) const;

  /// Semi-implicit integration of all vehicles from their stored accel:
  /// v' = max(0, v + a*dt), x' = x + v'*dt; advances the clock. Then verifies
  /// per-lane ordering and bumper gaps, raising SimulationFault on overlap.
  void integrate();

  /// Ordering/gap/conservation audit; throws SimulationFault on violation.
  void check_invariants() const;

  std::uint64_t entered() const { return entered_; }
  std::uint64_t exited() const { return exited_; }

private:
  std::size_t lane_slot(int lane) const;
  std::size_t index_of(VehicleId id) const;
  void insert_into_lane(VehicleId id, int lane);
  void erase_from_lane(VehicleId id, int lane);
  double position_of(VehicleId id) const { return vehicles_[index_of(id)].position; }

  NetworkGeometry geometry_;
  double clock_ = 0.0;
  double dt_ = 0.1;
  VehicleId next_id_ = 1;
  std::uint64_t entered_ = 0;
  std::uint64_t exited_ = 0;
  std::vector<VehicleState> vehicles_;           // id-ascending
  std::vector<std::vector<VehicleId>> lanes_;    // [slot] position-ascending
};

/// Brute-force O(n^2) neighbor scan; reference oracle for World::neighbors.
Neighborhood neighbors_bruteforce(const World& world, VehicleId id);

}  // namespace mlsim
