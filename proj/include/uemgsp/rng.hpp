#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace uemgsp {

// All randomness flows through std::mt19937_64 plus the explicit mappings
// below. The engine's output sequence is pinned by the C++ standard, and the
// mappings avoid std::*_distribution (whose results are implementation
// defined), so a 64-bit seed reproduces every draw bit-for-bit across
// platforms.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic substream seed. Stream ids keep graph generation, dataset
// generation and fold shuffling statistically decoupled under one base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base + 0x9e3779b97f4a7c15ULL * (stream + 1));
}

// Uniform in [0, 1) with 53-bit resolution.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_real(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(rng);
}

// Unbiased integer in [0, n) via rejection sampling.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below: n must be positive");
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t overflow = (kMax % n + 1) % n;  // 2^64 mod n
  for (;;) {
    const std::uint64_t v = rng();
    if (v <= kMax - overflow) return v % n;
  }
}

// Box-Muller; consumes exactly two engine draws per call.
inline double normal(Rng& rng, double mean, double stddev) {
  const double u1 = 1.0 - uniform_unit(rng);  // (0, 1], keeps log finite
  const double u2 = uniform_unit(rng);
  const double r = std::sqrt(-2.0 * std::log(u1));
  return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
}

// Fisher-Yates, descending index order.
template <typename T>
void shuffle_in_place(std::vector<T>& values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace uemgsp
