#pragma once

// Deterministic random helpers. std::shuffle and the std distributions are
// implementation-defined, so replay-stable streams map mt19937_64 output to
// ranges by hand; results are identical on every platform.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace cardsketch {

// Uniform in [0, n). Plain modulo: the bias is O(n / 2^64), irrelevant at
// desk scale and worth the determinism.
inline std::uint64_t bounded_u64(std::mt19937_64& rng, std::uint64_t n) {
  return rng() % n;
}

// Uniform in [0, 1) with 53 random bits.
inline double unit_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <class T>
inline void fisher_yates(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(bounded_u64(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

template <class It>
inline void fisher_yates_range(It first, It last, std::mt19937_64& rng) {
  const std::size_t n = static_cast<std::size_t>(last - first);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(bounded_u64(rng, i));
    std::swap(first[i - 1], first[j]);
  }
}

// Knuth's product-of-uniforms Poisson sampler; fine for the small means used
// by duplicate factors.
inline std::uint64_t poisson_knuth(double lambda, std::mt19937_64& rng) {
  if (lambda <= 0.0) return 0;
  const double limit = std::exp(-lambda);
  std::uint64_t k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= unit_double(rng);
  } while (p > limit);
  return k - 1;
}

}  // namespace cardsketch
