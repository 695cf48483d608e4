#pragma once

#include <cstdint>
#include <random>

namespace leakage {

/// The one generator type used throughout. Its output sequence is fixed by
/// the standard, so seeded runs reproduce across platforms.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

/// Uniform draw on the open interval (0, 1) from 53 random bits.
template <class URBG>
double uniform_open01(URBG& rng) {
  constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
  return (static_cast<double>(rng() >> 11) + 0.5) * scale;
}

}  // namespace leakage
