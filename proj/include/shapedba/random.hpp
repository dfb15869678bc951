#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string_view>
#include <vector>

#include "shapedba/error.hpp"

namespace shapedba {

// std::mt19937_64 has a standardized output sequence; the distributions in
// <random> do not, so sampling is done by hand to stay reproducible across
// standard libraries.
using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Engine keyed by a (name, seed) pair.
inline Engine make_engine(std::string_view name, std::uint64_t seed) {
  return Engine(splitmix64(fnv1a64(name) ^ splitmix64(seed)));
}

/// Unbiased integer in [0, n).
inline std::uint64_t uniform_index(Engine& engine, std::uint64_t n) {
  if (n == 0) throw InvalidArgument("uniform_index: empty range");
  const std::uint64_t limit = Engine::max() - (Engine::max() % n);
  std::uint64_t r = 0;
  do {
    r = engine();
  } while (r >= limit);
  return r % n;
}

/// k distinct indices from [0, n), in draw order (partial Fisher-Yates).
inline std::vector<std::size_t> sample_without_replacement(Engine& engine, std::size_t n,
                                                           std::size_t k) {
  if (k > n) {
    throw InvalidArgument("cannot draw " + std::to_string(k) + " distinct indices from " +
                          std::to_string(n));
  }
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_index(engine, n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

/// Standard normal deviate (Box-Muller), reproducible across platforms.
inline double standard_normal(Engine& engine) {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  const auto unit = [&] { return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53; };
  const double u1 = unit();
  const double u2 = unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

/// Uniform deviate in [lo, hi).
inline double uniform_real(Engine& engine, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(engine() >> 11) * 0x1.0p-53);
}

}  // namespace shapedba
