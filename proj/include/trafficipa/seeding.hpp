#pragma once

#include <cstdint>
#include <random>

namespace trafficipa {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Sub-seed for control cycle n of a run seeded with `seed`:
///   hash64(seed, n) = mix64(mix64(seed) ^ n)
/// Stable across platforms and releases, so cycle n can be re-simulated on
/// its own.
constexpr std::uint64_t cycle_seed(std::uint64_t seed, std::uint64_t n) {
  return mix64(mix64(seed) ^ n);
}

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit engine.
/// Avoids std::uniform_real_distribution, whose output is library-specific.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace trafficipa
