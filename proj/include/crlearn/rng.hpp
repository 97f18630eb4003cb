#pragma once

#include <cstdint>
#include <random>

namespace crlearn {

/// Counter-based seed derivation (splitmix64 finalizer over the base seed
/// advanced by the golden-ratio increment). Distinct indices give
/// well-separated streams; never use base + index directly.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

using RngEngine = std::mt19937_64;

inline RngEngine make_engine(std::uint64_t seed) { return RngEngine(seed); }

}  // namespace crlearn
