#pragma once

#include <cstdint>

namespace matta {

/// Deterministic xoshiro256** generator seeded through splitmix64.
///
/// State is an explicit value: copying an Rng forks an identical stream, and
/// `stream(seed, id)` derives statistically independent streams from one seed
/// (used to keep training and evaluation draws disjoint).
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  static Rng stream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Standard normal via Box-Muller; one draw per call.
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  std::uint64_t below(std::uint64_t n);

  // Child generator whose stream does not overlap this one in practice.
  Rng split();

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t s_[4];
  std::uint64_t seed_;
};

}  // namespace matta
