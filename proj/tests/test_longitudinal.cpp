#include <doctest.h>

#include <cmath>

#include "mlsim/longitudinal.hpp"
#include "mlsim/rng.hpp"
#include "oracles/eidm_reference.hpp"

using namespace mlsim;

namespace {
oracle::Params to_oracle(const IdmParams& p) {
  return {p.max_accel, p.comfort_decel, p.coolness, p.accel_exponent,
          p.desired_speed, p.min_gap, p.time_gap};
}
}  // namespace

TEST_CASE("desired gap: zero approach rate is s0 + vT") {
  IdmParams p = cacc_params(1.0);
  CHECK(desired_gap(29.17, 0.0, p) == doctest::Approx(30.17).epsilon(1e-12));
}

TEST_CASE("desired gap: hand evaluation with closing speed") {
  IdmParams p = cacc_params(1.0);  // a = b = 2 -> 2*sqrt(ab) = 4
  CHECK(desired_gap(20.0, 2.0, p) == doctest::Approx(31.0).epsilon(1e-12));
}

TEST_CASE("desired gap: dynamic term floored at s0") {
  IdmParams p = cacc_params(1.0);
  CHECK(desired_gap(20.0, -40.0, p) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("free acceleration: equilibrium at desired speed, launch at standstill") {
  IdmParams p = cacc_params(1.0);
  CHECK(free_accel(p.desired_speed, p) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(free_accel(0.0, p) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("idm equilibrium gap found by bisection matches the closed form") {
  IdmParams p = cacc_params(1.0);
  double v = 20.0;
  // accel(g) is increasing in g; bracket the root and bisect.
  double lo = 1.0, hi = 500.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (idm_accel(v, v, mid, p) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double bisected = 0.5 * (lo + hi);
  double closed = desired_gap(v, 0.0, p) /
                  std::sqrt(1.0 - std::pow(v / p.desired_speed, p.accel_exponent));
  CHECK(bisected == doctest::Approx(closed).epsilon(1e-6));
}

TEST_CASE("cah: equal speeds return the capped leader acceleration") {
  IdmParams p = cacc_params(1.0);
  CHECK(cah_accel(20.0, 20.0, 1.5, 40.0, p) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(cah_accel(20.0, 20.0, 5.0, 40.0, p) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("cah: stopped leader hand evaluation") {
  IdmParams p = cacc_params(1.0);
  // v=20, v_lead=0, gap=50, a_hat=-2: branch 1 = 400*(-2)/(0-2*50*(-2)) = -4
  CHECK(cah_accel(20.0, 0.0, -2.0, 50.0, p) == doctest::Approx(-4.0).epsilon(1e-12));
  CHECK(oracle::ref_cah(20.0, 0.0, -2.0, 50.0, to_oracle(p)) ==
        doctest::Approx(-4.0).epsilon(1e-12));
}

TEST_CASE("cah: opening case with accelerating leader follows the printed branch rule") {
  IdmParams p = cacc_params(1.0);
  // v=10, v_lead=20, a_hat=1, gap=30. The branch condition
  // v_lead*(v-v_lead) = -200 <= -2*gap*a_hat = -60 holds, so branch 1
  // applies: v^2*a_hat/(v_lead^2 - 2*gap*a_hat) = 100/340.
  double expected = 100.0 / 340.0;
  CHECK(cah_accel(10.0, 20.0, 1.0, 30.0, p) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(oracle::ref_cah(10.0, 20.0, 1.0, 30.0, to_oracle(p)) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("cah: guarded denominator falls back to branch 2") {
  IdmParams p = cacc_params(1.0);
  // v_lead=0 and a_hat=0 zeroes the denominator; branch 2 with Heaviside on.
  double a = cah_accel(5.0, 0.0, 0.0, 10.0, p);
  CHECK(a == doctest::Approx(0.0 - 25.0 / 20.0).epsilon(1e-12));
}

TEST_CASE("eidm switching: branches coincide at the boundary and stay continuous") {
  IdmParams p = cacc_params(1.0);
  double x = -1.3;
  CHECK(eidm_blend(x, x, p) == doctest::Approx(x).epsilon(1e-12));
  double eps = 1e-9;
  double above = eidm_blend(x + eps, x, p);
  double below = eidm_blend(x - eps, x, p);
  CHECK(std::abs(above - below) < 1e-7);
}

TEST_CASE("eidm blend matches the printed two-branch formula") {
  double v = 20.0, v_lead = 20.0, gap = 5.0;
  // At zero coolness the second branch collapses to the raw IDM value.
  {
    IdmParams p = cacc_params(1.0);
    p.coolness = 0.0;
    double xidm = idm_accel(v, v_lead, gap, p);
    double xcah = cah_accel(v, v_lead, 0.0, gap, p);
    REQUIRE(xidm < xcah);
    CHECK(eidm_accel(v, v_lead, 0.0, gap, p) == doctest::Approx(xidm).epsilon(1e-12));
  }
  // At full coolness the hand expression (1-c)*idm + c*(cah + b*tanh(..)).
  {
    IdmParams p = cacc_params(1.0);
    double xidm = idm_accel(v, v_lead, gap, p);
    double xcah = cah_accel(v, v_lead, 0.0, gap, p);
    REQUIRE(xidm < xcah);
    double b = p.comfort_decel;
    double expected = (1.0 - p.coolness) * xidm +
                      p.coolness * (xcah + b * std::tanh((xidm - xcah) / b));
    CHECK(eidm_accel(v, v_lead, 0.0, gap, p) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("eidm with full coolness relaxes panic braking behind a stopped leader") {
  IdmParams p = cacc_params(1.0);
  double v = 20.0, gap = 50.0;
  double raw_idm = idm_accel(v, 0.0, gap, p);
  double blended = eidm_accel(v, 0.0, -2.0, gap, p);
  CHECK(blended > raw_idm);
}

TEST_CASE("acceleration is finite and bounded for random finite inputs") {
  RngStream r(11);
  IdmParams cacc = cacc_params(1.0);
  for (int i = 0; i < 20000; ++i) {
    double v = r.uniform(0.0, 45.0);
    double vl = r.uniform(0.0, 45.0);
    double al = r.uniform(-6.0, 3.0);
    double gap = r.uniform(0.05, 400.0);
    double a1 = clamp_commanded(eidm_accel(v, vl, al, gap, cacc), cacc);
    double a2 = clamp_commanded(cacc_following_accel(v, vl, al, gap, cacc), cacc);
    REQUIRE(std::isfinite(a1));
    REQUIRE(std::isfinite(a2));
    REQUIRE(a1 >= -kMaxBrake);
    REQUIRE(a1 <= cacc.max_accel);
    REQUIRE(a2 >= -kMaxBrake);
    REQUIRE(a2 <= cacc.max_accel);
  }
}

TEST_CASE("larger gap never yields smaller idm acceleration") {
  RngStream r(13);
  for (int i = 0; i < 5000; ++i) {
    IdmParams p = cacc_params(r.uniform(0.8, 1.6));
    p.max_accel = r.uniform(0.5, 3.0);
    p.comfort_decel = r.uniform(0.5, 3.0);
    double v = r.uniform(0.0, 40.0);
    double vl = r.uniform(0.0, 40.0);
    double g1 = r.uniform(0.2, 200.0);
    double g2 = g1 + r.uniform(0.0, 200.0);
    REQUIRE(idm_accel(v, vl, g2, p) >= idm_accel(v, vl, g1, p) - 1e-12);
  }
}

TEST_CASE("cacc gap controller is in equilibrium exactly at s0 + vT") {
  IdmParams p = cacc_params(1.2);
  double v = 25.0;  // below desired speed
  double gap = p.min_gap + v * p.time_gap;
  CHECK(cacc_following_accel(v, v, 0.0, gap, p) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("non-positive gap with a leader present is a precondition fault") {
  IdmParams p = cacc_params(1.0);
  CHECK_THROWS_AS(idm_accel(10.0, 10.0, 0.0, p), SimulationFault);
  CHECK_THROWS_AS(cah_accel(10.0, 10.0, 0.0, -1.0, p), SimulationFault);
}

TEST_CASE("human parameter set carries the declared values") {
  IdmParams h = human_params(kmh_to_ms(100.0));
  CHECK(h.max_accel == doctest::Approx(1.4));
  CHECK(h.comfort_decel == doctest::Approx(2.0));
  CHECK(h.time_gap == doctest::Approx(1.4));
  CHECK(h.min_gap == doctest::Approx(2.0));
  CHECK(h.desired_speed == doctest::Approx(kmh_to_ms(100.0)));
}

TEST_CASE("table-4 cacc parameter set") {
  IdmParams p = cacc_params(1.0);
  CHECK(p.max_accel == doctest::Approx(2.0));
  CHECK(p.comfort_decel == doctest::Approx(2.0));
  CHECK(p.coolness == doctest::Approx(0.99));
  CHECK(p.accel_exponent == doctest::Approx(4.0));
  CHECK(p.desired_speed == doctest::Approx(105.0 / 3.6));
  CHECK(p.min_gap == doctest::Approx(1.0));
}
