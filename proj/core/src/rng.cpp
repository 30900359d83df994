#include "mlsim/rng.hpp"

#include <cmath>

namespace mlsim {

double RngStream::exponential(double rate) {
  // 1 - uniform() is in (0, 1], so the log is finite.
  return -std::log(1.0 - uniform()) / rate;
}

double RngStream::normal(double mean, double stddev) {
  double u1 = 1.0 - uniform();
  double u2 = uniform();
  double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  return mean + stddev * z;
}

double RngStream::normal_truncated(double mean, double stddev, double lo, double hi) {
  for (int i = 0; i < 1000; ++i) {
    double x = normal(mean, stddev);
    if (x >= lo && x <= hi) return x;
  }
  return mean < lo ? lo : (mean > hi ? hi : mean);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_cell_seed(std::uint64_t base_seed, Strategy strategy, double mp,
                               int replication) {
  std::uint64_t s = mix_seed(base_seed, static_cast<std::uint64_t>(strategy) + 1);
  s = mix_seed(s, static_cast<std::uint64_t>(std::llround(mp * 10000.0)) + 1);
  s = mix_seed(s, static_cast<std::uint64_t>(replication) + 1);
  return s;
}

}  // namespace mlsim
