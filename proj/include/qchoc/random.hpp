// random.hpp
// Portable draws from a 64-bit engine. The standard distributions are
// implementation-defined, so reports would not be byte-stable across
// standard libraries if we used them.

#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace qchoc {

using Rng = std::mt19937_64;

/// Independent stream for (seed, shard, lane).
inline Rng make_stream(std::uint64_t seed, std::uint64_t shard = 0, std::uint64_t lane = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(shard), static_cast<std::uint32_t>(shard >> 32),
                    static_cast<std::uint32_t>(lane), static_cast<std::uint32_t>(lane >> 32)};
  return Rng(seq);
}

/// Uniform double in [0, 1) with 53 random bits.
template <class Engine>
double uniform_unit(Engine& rng) {
  static_assert(Engine::max() == std::numeric_limits<std::uint64_t>::max() && Engine::min() == 0);
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound), bound > 0, by rejection.
template <class Engine>
std::uint64_t uniform_below(Engine& rng, std::uint64_t bound) {
  static_assert(Engine::max() == std::numeric_limits<std::uint64_t>::max() && Engine::min() == 0);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    const std::uint64_t r = rng();
    if (r < limit) return r % bound;
  }
}

}  // namespace qchoc
