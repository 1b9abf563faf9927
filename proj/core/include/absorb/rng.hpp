#pragma once

#include <cstdint>

namespace absorb {

// SplitMix64. Small, portable, and bit-stable across platforms, which is
// what the simulation determinism contract needs.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) using the top 53 bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Stream for trajectory `index` under `master_seed`: the stream seed is
// one mixing step applied to master_seed + (index+1) * golden-gamma, so
// results do not depend on how trajectories are scheduled.
inline SplitMix64 trajectory_stream(std::uint64_t master_seed, std::uint64_t index) {
  SplitMix64 mixer(master_seed + (index + 1) * 0x9E3779B97F4A7C15ULL);
  return SplitMix64(mixer.next());
}

}  // namespace absorb
