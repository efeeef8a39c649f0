#pragma once

// Seeded sampling helpers. Every random draw in the library goes through
// std::mt19937_64 plus the fixed algorithms below, so a given seed produces
// bit-identical streams regardless of the standard library's distribution
// implementations.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace ridepool {

/// Uniform double in [0, 1) using the top 53 bits of one engine draw.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform index in [0, n).
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: n must be > 0");
  auto i = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
  return i < n ? i : n - 1;
}

/// Poisson count via the multiplicative method, chunked so large means do not
/// underflow exp(-mean).
inline std::uint64_t poisson_draw(std::mt19937_64& rng, double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean))
    throw std::invalid_argument("poisson_draw: mean must be finite and >= 0");
  std::uint64_t total = 0;
  while (mean > 0.0) {
    const double chunk = mean > 30.0 ? 30.0 : mean;
    mean -= chunk;
    const double limit = std::exp(-chunk);
    double p = 1.0;
    std::uint64_t k = 0;
    do {
      p *= uniform01(rng);
      ++k;
    } while (p > limit);
    total += k - 1;
  }
  return total;
}

/// Index draw from a discrete distribution given its strictly increasing
/// cumulative weights (last entry = total mass).
inline std::size_t categorical_draw(std::mt19937_64& rng,
                                    const std::vector<double>& cumulative) {
  if (cumulative.empty() || cumulative.back() <= 0.0)
    throw std::invalid_argument("categorical_draw: no mass");
  const double target = uniform01(rng) * cumulative.back();
  std::size_t lo = 0, hi = cumulative.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (cumulative[mid] <= target)
      lo = mid + 1;
    else
      hi = mid;
  }
  return lo;
}

/// splitmix64 step; used to derive independent sub-seeds from a master seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + salt * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace ridepool
