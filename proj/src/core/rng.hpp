#pragma once

#include <cstdint>
#include <random>

namespace duality {

// Deterministic random source.  All randomness in the library flows through
// this wrapper so that a (seed, trial index) pair pins down a trial exactly,
// independent of platform and thread schedule.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  // Independent stream for a sub-task; derived seed is seed ^ index.
  RandomSource derive(std::uint64_t index) const { return RandomSource(seed_ ^ index); }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of mantissa.
  double uniform();
  double uniform(double lo, double hi);

  // Inclusive on both ends.
  int uniform_int(int lo, int hi);

  // Standard normal via Box-Muller; pairs are cached.
  double gaussian();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double cached_gaussian_ = 0.0;
  bool has_cached_gaussian_ = false;
};

}  // namespace duality
