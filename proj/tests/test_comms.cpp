#include <doctest.h>

#include <cmath>

#include "mlsim/comms.hpp"

using namespace mlsim;

TEST_CASE("parametric reception is near one at zero distance") {
  ChannelModel m;  // defaults: k=0.03, midpoint=250
  CHECK(reception_probability(m, 0.0) >= 0.99);
}

TEST_CASE("reception beyond max range is exactly zero") {
  ChannelModel m;
  m.max_range = 500.0;
  CHECK(reception_probability(m, 500.1) == 0.0);
  ChannelModel ideal = ideal_channel(300.0);
  CHECK(reception_probability(ideal, 300.1) == 0.0);
  CHECK(reception_probability(ideal, 299.9) == 1.0);
}

TEST_CASE("logistic midpoint identity: p(m) = 1/2 at zero load") {
  ChannelModel m;
  m.load = 0.0;
  CHECK(reception_probability(m, m.midpoint) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("probability is non-increasing in distance and in load") {
  RngStream r(3);
  for (int trial = 0; trial < 2000; ++trial) {
    ChannelModel m;
    m.midpoint = r.uniform(50.0, 400.0);
    m.steepness = r.uniform(0.005, 0.1);
    m.load = r.uniform(0.0, 1.0);
    m.max_range = 600.0;
    double d1 = r.uniform(0.0, 600.0);
    double d2 = d1 + r.uniform(0.0, 600.0 - d1);
    REQUIRE(reception_probability(m, d2) <= reception_probability(m, d1) + 1e-12);

    double fixed_d = r.uniform(0.0, 500.0);
    ChannelModel hi = m;
    hi.load = std::min(1.0, m.load + r.uniform(0.0, 1.0 - m.load));
    REQUIRE(reception_probability(hi, fixed_d) <= reception_probability(m, fixed_d) + 1e-12);
  }
}

TEST_CASE("table model interpolates linearly and rejects non-monotone input") {
  ChannelModel t = table_channel({{0.0, 1.0}, {100.0, 0.8}, {300.0, 0.2}}, 400.0);
  CHECK(reception_probability(t, 50.0) == doctest::Approx(0.9));
  CHECK(reception_probability(t, 200.0) == doctest::Approx(0.5));
  CHECK(reception_probability(t, 350.0) == doctest::Approx(0.2));  // clamped to last point
  CHECK(reception_probability(t, 401.0) == 0.0);
  CHECK_THROWS_AS(table_channel({{0.0, 0.5}, {100.0, 0.8}}, 400.0), ConfigError);
  CHECK_THROWS_AS(table_channel({{100.0, 0.5}, {100.0, 0.4}}, 400.0), ConfigError);
}

TEST_CASE("link sampling limits: p=1 always true, p=0 always false") {
  RngStream r(5);
  ChannelModel ideal = ideal_channel(1000.0);
  ChannelModel dead = ideal_channel(0.0);
  for (int i = 0; i < 1000; ++i) {
    CHECK(sample_link(ideal, r, 500.0));
    CHECK_FALSE(sample_link(dead, r, 1.0));
  }
}

TEST_CASE("bernoulli sampling matches the probability in the large-sample limit") {
  ChannelModel m = table_channel({{0.0, 0.7}, {1000.0, 0.7}}, 2000.0);
  RngStream r(17);
  int hits = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    if (sample_link(m, r, 500.0)) ++hits;
  }
  CHECK(std::abs(static_cast<double>(hits) / n - 0.7) < 0.01);
}

TEST_CASE("ideal channel consumes no randomness") {
  ChannelModel ideal = ideal_channel(300.0);
  RngStream a(99), b(99);
  (void)sample_link(ideal, a, 100.0);
  (void)sample_link(ideal, a, 100.0);
  CHECK(a.next_u64() == b.next_u64());
}
