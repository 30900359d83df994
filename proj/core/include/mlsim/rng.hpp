#pragma once

#include <cstdint>

#include "mlsim/types.hpp"

namespace mlsim {

/// Deterministic 64-bit random stream (splitmix64 core). Hand-rolled
/// distributions so that sequences are identical across standard libraries
/// and platforms; replication-level determinism depends on it.
class RngStream {
public:
  explicit RngStream(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n), n >= 1.
  std::uint32_t uniform_int(std::uint32_t n) {
    return static_cast<std::uint32_t>(uniform() * static_cast<double>(n));
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Exponential with the given rate (events per unit time).
  double exponential(double rate);

  /// Box-Muller normal draw (two uniforms consumed, no spare cached).
  double normal(double mean, double stddev);

  /// Rejection-sampled truncated normal on [lo, hi].
  double normal_truncated(double mean, double stddev, double lo, double hi);

private:
  std::uint64_t state_;
};

/// Order-sensitive seed combine for deriving stream seeds from a base seed.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// Stable per-cell seed: any matrix cell derives its seed from the base seed
/// and its own coordinates only, so cells are independent of which other
/// cells run.
std::uint64_t derive_cell_seed(std::uint64_t base_seed, Strategy strategy, double mp,
                               int replication);

}  // namespace mlsim
