#pragma once

#include <cstdint>
#include <random>

namespace dstomo {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Uniform double in [0, 1) from the engine's raw 64-bit output. Avoids the
/// implementation-defined std::uniform_real_distribution so streams are
/// reproducible for a given engine state.
inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Standard normal pair by Box-Muller.
inline void gaussian_pair(std::mt19937_64& g, double& a, double& b) {
  double u = uniform01(g);
  while (u <= 0.0) u = uniform01(g);
  const double r = std::sqrt(-2.0 * std::log(u));
  const double phi = 2.0 * 3.14159265358979323846 * uniform01(g);
  a = r * std::cos(phi);
  b = r * std::sin(phi);
}

/// Seed for sampling block `block`: streams are generated in fixed-size
/// blocks with independently seeded engines, so a stream can be split
/// across workers without changing its contents.
inline std::uint64_t block_seed(std::uint64_t seed, std::uint64_t block) {
  return splitmix64(seed ^ splitmix64(block + 1));
}

}  // namespace dstomo
