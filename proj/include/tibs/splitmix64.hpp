#pragma once

#include <cstdint>

namespace tibs {

// SplitMix64 pseudo-random generator (Steele/Lea/Flood splittable-RNG
// finalizer; public domain). The output stream for a given seed is
// bit-identical on every platform, so seeded runs reproduce exactly across
// implementations.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0,1): the 53 high bits of next() divided by 2^53.
  double next_unit() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

}  // namespace tibs
