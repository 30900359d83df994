#include <doctest.h>

#include <cmath>

#include "mlsim/config.hpp"
#include "mlsim/scenario.hpp"

using namespace mlsim;

TEST_CASE("lane eligibility follows the strategy table") {
  NetworkGeometry g = default_geometry();
  const int ml = g.managed_lane();

  CHECK(lane_eligibility(Strategy::MML, VehClass::CACC, ml, g));
  CHECK(lane_eligibility(Strategy::MML, VehClass::HOV, ml, g));
  CHECK_FALSE(lane_eligibility(Strategy::MML, VehClass::GP, ml, g));

  CHECK_FALSE(lane_eligibility(Strategy::DL, VehClass::GP, ml, g));
  CHECK_FALSE(lane_eligibility(Strategy::DL, VehClass::HOV, ml, g));
  CHECK(lane_eligibility(Strategy::DL, VehClass::CACC, ml, g));
  CHECK_FALSE(lane_eligibility(Strategy::DLA, VehClass::HOV, ml, g));

  for (VehClass k : {VehClass::GP, VehClass::HOV, VehClass::CACC}) {
    CHECK(lane_eligibility(Strategy::UML, k, ml, g));
    for (int lane = 0; lane < ml; ++lane) {
      CHECK(lane_eligibility(Strategy::BASE, k, lane, g));
      CHECK(lane_eligibility(Strategy::DL, k, lane, g));
    }
  }
  CHECK(lane_eligibility(Strategy::BASE, VehClass::HOV, ml, g));
  CHECK_FALSE(lane_eligibility(Strategy::BASE, VehClass::GP, ml, g));
  CHECK_FALSE(lane_eligibility(Strategy::BASE, VehClass::CACC, ml, g));
}

TEST_CASE("access zones: 333 m per required lane change") {
  NetworkGeometry g;
  g.lanes = 4;
  g.mainline_length = 20000.0;
  g.interchanges = {{"Z2", 6000.0, 7000.0, 300.0}};

  SUBCASE("ramp attaching at lane 0 needs three changes -> 999 m") {
    auto zones = access_zone_builder(g, 0);
    bool found = false;
    for (const auto& z : zones) {
      if (z.start == doctest::Approx(7300.0) && z.end == doctest::Approx(8299.0)) found = true;
    }
    CHECK(found);
  }
  SUBCASE("entry already in lane 2 -> single 333 m zone at the origin") {
    auto zones = access_zone_builder(g, 2);
    REQUIRE_FALSE(zones.empty());
    CHECK(zones.front().start == doctest::Approx(0.0));
    CHECK(zones.front().end == doctest::Approx(333.0));
  }
  SUBCASE("overlapping zones merge") {
    NetworkGeometry g2 = g;
    g2.interchanges = {{"Z2", 6000.0, 7000.0, 300.0}, {"Z3", 8250.0, 9000.0, 300.0}};
    // Entry zone after Z2's merge [7300, 8299] overlaps Z3's exit zone
    // [7251, 8250]; the union must appear as one zone.
    auto zones = access_zone_builder(g2, 0);
    int overlapping = 0;
    for (const auto& z : zones) {
      if (z.start <= 7300.0 && z.end >= 8299.0) ++overlapping;
    }
    CHECK(overlapping == 1);
    for (std::size_t i = 1; i < zones.size(); ++i) {
      CHECK(zones[i].start > zones[i - 1].end);
    }
  }
}

TEST_CASE("managed-lane boundary crossings under DLA are zone-gated") {
  ScenarioConfig cfg = default_scenario();
  cfg.strategy = Strategy::DLA;
  cfg.finalize();
  const auto& g = cfg.geometry;
  REQUIRE_FALSE(g.access_zones.empty());
  double inside = 0.5 * (g.access_zones[0].start + g.access_zones[0].end);
  double outside = g.access_zones[0].end + 1.0;
  bool outside_in_any = g.in_access_zone(outside);
  CHECK(lane_change_allowed(Strategy::DLA, VehClass::CACC, 2, 3, inside, g));
  if (!outside_in_any) {
    CHECK_FALSE(lane_change_allowed(Strategy::DLA, VehClass::CACC, 2, 3, outside, g));
    CHECK_FALSE(lane_change_allowed(Strategy::DLA, VehClass::CACC, 3, 2, outside, g));
  }
  // Non-boundary moves are free.
  CHECK(lane_change_allowed(Strategy::DLA, VehClass::CACC, 1, 2, outside, g));
  // Other strategies carry no zones.
  ScenarioConfig dl = default_scenario();
  dl.strategy = Strategy::DL;
  dl.finalize();
  CHECK(dl.geometry.access_zones.empty());
  CHECK(lane_change_allowed(Strategy::DL, VehClass::CACC, 2, 3, outside, dl.geometry));
}

TEST_CASE("poisson arrival count: one hour at 3600 vph is 3600 +- 3 sigma") {
  DemandTable t;
  t.interval_s = 900.0;
  for (int i = 0; i < 4; ++i) t.rows.push_back({"Z1", i * 900.0, 3600.0, 0.0});
  ArrivalGenerator gen(t, {{"Z1", 0, {}}}, 0.0, false, 0.15, 123, 456, 29.17);
  std::vector<Arrival> out;
  gen.generate(0.0, 3600.0, out);
  double n = static_cast<double>(out.size());
  CHECK(std::abs(n - 3600.0) <= 3.0 * std::sqrt(3600.0));
  for (std::size_t i = 1; i < out.size(); ++i) REQUIRE(out[i].time >= out[i - 1].time);
}

TEST_CASE("windowed generation loses no arrivals at window boundaries") {
  DemandTable t;
  t.interval_s = 900.0;
  t.rows.push_back({"Z1", 0.0, 1800.0, 0.0});
  ArrivalGenerator whole(t, {{"Z1", 0, {}}}, 0.0, false, 0.15, 9, 10, 29.17);
  std::vector<Arrival> expect;
  whole.generate(0.0, 900.0, expect);

  ArrivalGenerator stepped(t, {{"Z1", 0, {}}}, 0.0, false, 0.15, 9, 10, 29.17);
  std::vector<Arrival> got;
  for (int k = 0; k < 9000; ++k) stepped.generate(k * 0.1, (k + 1) * 0.1, got);
  REQUIRE(got.size() == expect.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i].time == doctest::Approx(expect[i].time).epsilon(1e-12));
  }
}

TEST_CASE("market penetration zero produces no CACC arrivals") {
  DemandTable t = default_demand();
  ArrivalGenerator gen(t, {{"Z1", 0, {0, 1}}}, 0.0, false, 0.15, 5, 6, 29.17);
  std::vector<Arrival> out;
  gen.generate(0.0, 1800.0, out);
  for (const auto& a : out) CHECK(a.klass != VehClass::CACC);
}

TEST_CASE("cacc share tracks MP within binomial tolerance") {
  DemandTable t;
  t.interval_s = 3600.0;
  t.rows.push_back({"Z1", 0.0, 10000.0, 0.0});
  ArrivalGenerator gen(t, {{"Z1", 0, {}}}, 0.4, false, 0.15, 321, 654, 29.17);
  std::vector<Arrival> out;
  gen.generate(0.0, 3600.0, out);
  REQUIRE(out.size() > 5000);
  int cacc = 0;
  for (const auto& a : out) {
    if (a.klass == VehClass::CACC) ++cacc;
  }
  double share = static_cast<double>(cacc) / static_cast<double>(out.size());
  CHECK(std::abs(share - 0.4) < 0.015);
}

TEST_CASE("hov share: folded strategies never emit HOV, others follow the table split") {
  DemandTable t;
  t.interval_s = 3600.0;
  t.rows.push_back({"Z1", 0.0, 7000.0, 3000.0});
  ArrivalGenerator folded(t, {{"Z1", 0, {}}}, 0.2, true, 0.15, 11, 12, 29.17);
  std::vector<Arrival> out;
  folded.generate(0.0, 3600.0, out);
  for (const auto& a : out) CHECK(a.klass != VehClass::HOV);

  ArrivalGenerator kept(t, {{"Z1", 0, {}}}, 0.0, false, 0.15, 11, 12, 29.17);
  std::vector<Arrival> out2;
  kept.generate(0.0, 3600.0, out2);
  int hov = 0;
  for (const auto& a : out2) {
    if (a.klass == VehClass::HOV) ++hov;
  }
  double share = static_cast<double>(hov) / static_cast<double>(out2.size());
  CHECK(std::abs(share - 0.3) < 0.02);
}

TEST_CASE("destination split routes a fixed share to each downstream off-ramp") {
  DemandTable t;
  t.interval_s = 3600.0;
  t.rows.push_back({"Z1", 0.0, 20000.0, 0.0});
  ArrivalGenerator gen(t, {{"Z1", 0, {0, 1}}}, 0.0, false, 0.15, 88, 99, 29.17);
  std::vector<Arrival> out;
  gen.generate(0.0, 3600.0, out);
  REQUIRE(out.size() > 10000);
  int r0 = 0, r1 = 0;
  for (const auto& a : out) {
    if (a.dest_offramp == 0) ++r0;
    if (a.dest_offramp == 1) ++r1;
  }
  double n = static_cast<double>(out.size());
  CHECK(std::abs(r0 / n - 0.15) < 0.01);
  CHECK(std::abs(r1 / n - 0.15) < 0.01);
}

TEST_CASE("default scenario validates cleanly; violations are named") {
  ScenarioConfig cfg = default_scenario();
  CHECK(validate_scenario(cfg).empty());

  SUBCASE("T_intra >= T_inter is a named violation") {
    cfg.platoon.t_intra = 1.3;
    auto v = validate_scenario(cfg);
    REQUIRE_FALSE(v.empty());
    bool named = false;
    for (const auto& msg : v) {
      if (msg.find("T_intra") != std::string::npos) named = true;
    }
    CHECK(named);
  }
  SUBCASE("non-monotone comms table is a named violation") {
    cfg.channel.kind = ChannelKind::Table;
    cfg.channel.table = {{0.0, 0.5}, {100.0, 0.9}};
    auto v = validate_scenario(cfg);
    REQUIRE_FALSE(v.empty());
    bool named = false;
    for (const auto& msg : v) {
      if (msg.find("non-increasing") != std::string::npos) named = true;
    }
    CHECK(named);
  }
  SUBCASE("warmup past horizon is rejected") {
    cfg.warmup = cfg.horizon + 1.0;
    CHECK_FALSE(validate_scenario(cfg).empty());
  }
}

TEST_CASE("config text round-trip: sections override defaults, unknown keys fail") {
  std::string text = R"(
[run]
strategies = BASE,DL
mp_values = 0.1,0.4
replications = 2
base_seed = 7

[scenario]
horizon_s = 1200
warmup_s = 300

[platoon]
T_intra_s = 0.9

[comms]
model = ideal
max_range_m = 250
)";
  LoadedConfig cfg = parse_config(text);
  CHECK(cfg.matrix.strategies == std::vector<Strategy>{Strategy::BASE, Strategy::DL});
  REQUIRE(cfg.matrix.mp_values.size() == 2);
  CHECK(cfg.matrix.mp_values[1] == doctest::Approx(0.4));
  CHECK(cfg.matrix.replications == 2);
  CHECK(cfg.scenario.horizon == doctest::Approx(1200.0));
  CHECK(cfg.scenario.platoon.t_intra == doctest::Approx(0.9));
  CHECK(cfg.scenario.channel.kind == ChannelKind::Ideal);
  CHECK(cfg.scenario.channel.max_range == doctest::Approx(250.0));

  CHECK_THROWS_AS(parse_config("[scenario]\nbogus_key = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[nosuch]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[run]\nreplications = abc\n"), ConfigError);
}

TEST_CASE("mp list parsing: ranges and lists") {
  auto range = parse_mp_list("0.05:0.55:0.05");
  REQUIRE(range.size() == 11);
  CHECK(range.front() == doctest::Approx(0.05));
  CHECK(range.back() == doctest::Approx(0.55));
  auto list = parse_mp_list("0, 0.4");
  REQUIRE(list.size() == 2);
  CHECK(list[0] == doctest::Approx(0.0));
}

TEST_CASE("desk-scale preset shrinks the network and halves demand") {
  ScenarioConfig desk = desk_scale(default_scenario());
  CHECK(desk.geometry.mainline_length == doctest::Approx(2000.0));
  CHECK(desk.horizon == doctest::Approx(1800.0));
  REQUIRE(desk.geometry.interchanges.size() == 2);
  auto [gp, hov] = desk.demand.rates_at("Z1", 0.0);
  CHECK(gp == doctest::Approx(0.5 * 4197.0));
  CHECK(hov == doctest::Approx(0.5 * 1885.0));
  CHECK(validate_scenario(desk).empty());
}

TEST_CASE("default demand ships the printed network table") {
  DemandTable t = default_demand();
  auto [gp_peak, hov_peak] = t.rates_at("Z1", 1000.0);
  CHECK(gp_peak == doctest::Approx(4197.0));
  CHECK(hov_peak == doctest::Approx(1885.0));
  auto [z3_gp, z3_hov] = t.rates_at("Z3", 1000.0);
  CHECK(z3_gp == doctest::Approx(1411.0));
  CHECK(z3_hov == doctest::Approx(1411.0));  // shipped as printed
}
