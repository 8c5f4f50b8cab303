#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

// Deterministic random primitives. std::mt19937_64 is bit-exact across
// platforms, but the standard distributions are not, so every draw that
// feeds a reproducible artifact goes through the helpers below.
//
// Stream contract (tests reimplement this independently):
//   uniform_index(rng, n): for n <= 1 returns 0 without drawing; otherwise
//     rejection sampling on raw 64-bit words: redraw while
//     word >= 2^64 - (2^64 mod n), then return word % n.
//   uniform_unit(rng): ((word >> 11) + 0.5) * 2^-53, always in (0,1).
//   gaussian(rng): Box-Muller, sqrt(-2 ln u1) * cos(2 pi u2) with u1 drawn
//     before u2; one value per call, the sine mate is discarded.

namespace shillkit {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Folds a value into a seed; applied left to right this defines the
// per-cell seed derivation used by the experiment grid.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t value) {
  return splitmix64(seed ^ value);
}

inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t rem = (~std::uint64_t{0} % n + 1) % n;  // 2^64 mod n
  const std::uint64_t last_ok = ~std::uint64_t{0} - rem;
  std::uint64_t word = rng();
  while (word > last_ok) word = rng();
  return word % n;
}

inline double uniform_unit(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double gaussian(std::mt19937_64& rng) {
  const double u1 = uniform_unit(rng);
  const double u2 = uniform_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace shillkit
