#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace vscsim {

using Rng = std::mt19937_64;

/// Derives a named sub-seed from a master seed.
///
/// Rule: splitmix64(master ^ fnv1a64(name)). Every independent source of
/// randomness (trace generators, each agent, validation traces) gets its own
/// name, so changing one source never perturbs another.
std::uint64_t derive_seed(std::uint64_t master, std::string_view name);

std::uint64_t splitmix64(std::uint64_t x);

/// Uniform double in [0, 1) using the top 53 bits of one draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n). n is tiny here (action counts), so the modulo
/// bias of a 64-bit draw is negligible.
inline int uniform_index(Rng& rng, int n) {
  return static_cast<int>(rng() % static_cast<std::uint64_t>(n));
}

}  // namespace vscsim
