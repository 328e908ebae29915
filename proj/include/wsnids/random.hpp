#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

// Seeded helpers whose output depends only on the engine stream, unlike the
// <random> distributions whose algorithms vary between standard libraries.
namespace wsnids::rng {

using Engine = std::mt19937_64;

/// Derives an independent engine seed from a base seed and a stream tag.
inline std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Uniform in [0, 1).
inline double uniform01(Engine& e) { return static_cast<double>(e() >> 11) * 0x1.0p-53; }

inline double uniform(Engine& e, double lo, double hi) { return lo + (hi - lo) * uniform01(e); }

/// Uniform integer in [0, n). n must be positive.
inline std::size_t index(Engine& e, std::size_t n) {
  return static_cast<std::size_t>(uniform01(e) * static_cast<double>(n));
}

/// Uniform integer in [lo, hi].
inline long integer(Engine& e, long lo, long hi) {
  return lo + static_cast<long>(index(e, static_cast<std::size_t>(hi - lo + 1)));
}

inline bool bernoulli(Engine& e, double p) { return uniform01(e) < p; }

inline double normal(Engine& e, double mean = 0.0, double sd = 1.0) {
  double u1 = uniform01(e);
  while (u1 <= 0.0) u1 = uniform01(e);
  const double u2 = uniform01(e);
  return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline double lognormal(Engine& e, double median, double log_sd) {
  return median * std::exp(normal(e, 0.0, log_sd));
}

template <typename T>
void shuffle(std::vector<T>& v, Engine& e) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[index(e, i)]);
  }
}

}  // namespace wsnids::rng
