#include <doctest.h>

#include "mlsim/rng.hpp"
#include "mlsim/world.hpp"

using namespace mlsim;

namespace {
NetworkGeometry plain_geometry(int lanes = 4, double length = 8000.0) {
  NetworkGeometry g;
  g.lanes = lanes;
  g.mainline_length = length;
  return g;
}

VehicleId put(World& w, int lane, double pos, double speed = 20.0, double accel = 0.0) {
  VehicleState v;
  v.lane = lane;
  v.position = pos;
  v.speed = speed;
  v.accel = accel;
  v.length = 4.5;
  v.desired_speed = 30.0;
  return w.spawn(v);
}
}  // namespace

TEST_CASE("single-vehicle kinematics: constant speed advances v*dt") {
  World w(plain_geometry(), 0.1);
  VehicleId id = put(w, 0, 100.0, 20.0, 0.0);
  w.integrate();
  CHECK(w.find(id)->position == doctest::Approx(102.0).epsilon(1e-12));
  CHECK(w.clock() == doctest::Approx(0.1));
}

TEST_CASE("speed clamps at zero instead of going negative") {
  World w(plain_geometry(), 0.1);
  VehicleId id = put(w, 0, 100.0, 0.05, -2.0);
  w.integrate();
  CHECK(w.find(id)->speed == 0.0);
  CHECK(w.find(id)->position == doctest::Approx(100.0));
}

TEST_CASE("sole vehicle has an empty neighborhood") {
  World w(plain_geometry(), 0.1);
  VehicleId id = put(w, 1, 500.0);
  Neighborhood n = w.neighbors(id);
  CHECK(n.lead_same == kNoVehicle);
  CHECK(n.foll_same == kNoVehicle);
  CHECK(n.lead_left == kNoVehicle);
  CHECK(n.foll_left == kNoVehicle);
  CHECK(n.lead_right == kNoVehicle);
  CHECK(n.foll_right == kNoVehicle);
}

TEST_CASE("three vehicles in one lane: middle sees the outer two") {
  World w(plain_geometry(), 0.1);
  VehicleId a = put(w, 2, 100.0);
  VehicleId b = put(w, 2, 200.0);
  VehicleId c = put(w, 2, 300.0);
  Neighborhood n = w.neighbors(b);
  CHECK(n.lead_same == c);
  CHECK(n.foll_same == a);
}

TEST_CASE("randomized placement matches the exhaustive neighbor scan") {
  RngStream r(21);
  World w(plain_geometry(), 0.1);
  std::vector<VehicleId> ids;
  for (int i = 0; i < 50; ++i) {
    int lane = static_cast<int>(r.uniform_int(4));
    double pos = r.uniform(0.0, 2000.0);
    ids.push_back(put(w, lane, pos));
  }
  for (VehicleId id : ids) {
    Neighborhood fast = w.neighbors(id);
    Neighborhood slow = neighbors_bruteforce(w, id);
    CHECK(fast.lead_same == slow.lead_same);
    CHECK(fast.foll_same == slow.foll_same);
    CHECK(fast.lead_left == slow.lead_left);
    CHECK(fast.foll_left == slow.foll_left);
    CHECK(fast.lead_right == slow.lead_right);
    CHECK(fast.foll_right == slow.foll_right);
  }
}

TEST_CASE("overlap after integration is a hard fault with diagnostics") {
  World w(plain_geometry(), 0.1);
  put(w, 0, 100.0, 30.0, 0.0);   // fast follower
  put(w, 0, 104.0, 0.0, 0.0);    // stopped just ahead (gap 4.5 - 4 < 0 soon)
  CHECK_THROWS_AS(w.integrate(), SimulationFault);
}

TEST_CASE("lane change keeps per-lane ordering intact") {
  World w(plain_geometry(), 0.1);
  VehicleId a = put(w, 0, 100.0);
  VehicleId b = put(w, 1, 150.0);
  VehicleId c = put(w, 1, 50.0);
  w.change_lane(a, 1);
  const auto& lane1 = w.lane_vehicles(1);
  REQUIRE(lane1.size() == 3);
  CHECK(lane1[0] == c);
  CHECK(lane1[1] == a);
  CHECK(lane1[2] == b);
  CHECK(w.lane_vehicles(0).empty());
}

TEST_CASE("vehicle conservation: entered equals exited plus present") {
  World w(plain_geometry(), 0.1);
  VehicleId a = put(w, 0, 100.0);
  put(w, 0, 200.0);
  CHECK(w.entered() == 2);
  w.remove(a);
  CHECK(w.exited() == 1);
  w.check_invariants();
}

TEST_CASE("aux lanes adjoin lane 0 only") {
  NetworkGeometry g = plain_geometry();
  g.interchanges = {{"Z2", 2800.0, 3200.0, 300.0}};
  World w(g, 0.1);
  VehicleId ramp = put(w, g.aux_lane_id(0), 3250.0);
  VehicleId main0 = put(w, 0, 3300.0);
  Neighborhood n = w.neighbors(ramp);
  CHECK(n.lead_left == main0);
  CHECK(w.left_lane(g.aux_lane_id(0)) == 0);
  CHECK_FALSE(w.right_lane(g.aux_lane_id(0)).has_value());
}
