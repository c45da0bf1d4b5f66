#pragma once

#include <cstdint>
#include <random>

namespace captive {

/// Independent generator for stream `index` of a seeded experiment. Both
/// std::seed_seq and std::mt19937_64 are fully specified by the standard, so
/// streams are identical across platforms and independent of scheduling.
inline std::mt19937_64 stream_for(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * uniform01(gen);
}

/// Uniform integer in [0, k).
inline std::uint64_t uniform_index(std::mt19937_64& gen, std::uint64_t k) {
  return static_cast<std::uint64_t>(uniform01(gen) * static_cast<double>(k)) % k;
}

}  // namespace captive
