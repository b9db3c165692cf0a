#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace i2e {

using Rng = std::mt19937_64;

// std::uniform_int_distribution is implementation-defined; these helpers are
// not, so seeded outputs are identical across standard libraries.

/// Uniform integer in [0, n), n > 0, by rejection sampling.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t r = rng();
  while (r >= limit) r = rng();
  return r % n;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace i2e
