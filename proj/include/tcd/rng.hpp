#pragma once

#include <cstdint>

namespace tcd {

/**
 * splitmix64: seedable 64-bit generator with independently seeded
 * substreams (Steele, Lea & Flood; Vigna's fixed-increment variant).
 *
 * A substream is placed at a pseudo-random phase of the single 2^64 cycle
 * via the finalizer, so distinct block ids give effectively independent
 * streams.  Event blocks keyed by block id can then be processed by any
 * number of workers in any order and still reproduce bit-identical output.
 */
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static SplitMix64 substream(std::uint64_t seed, std::uint64_t block) {
    return SplitMix64(mix(seed + 0x9E3779B97F4A7C15ULL * (block + 1)));
  }

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53-bit resolution.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform double in [lo, hi).
  double next_double(double lo, double hi) { return lo + (hi - lo) * next_double(); }

 private:
  std::uint64_t state_;
};

}  // namespace tcd
