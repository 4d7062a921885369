#pragma once

// Estimator constants: the alpha bias-correction factor for harmonic-mean
// register estimators and the beta factor appearing in the RSE ~ beta/sqrt(m)
// error model.

#include <cstddef>
#include <string>

#include "cardsketch/errors.hpp"

namespace cardsketch {

// alpha_16 = 0.673, alpha_32 = 0.697, alpha_64 = 0.709,
// alpha_m  = 0.7213 / (1 + 1.079/m) for m >= 128.
// Sizes below 16 and sizes in (64, 128) off the table are rejected.
inline double alpha_constant(std::size_t m) {
  switch (m) {
    case 16: return 0.673;
    case 32: return 0.697;
    case 64: return 0.709;
    default: break;
  }
  if (m >= 128) return 0.7213 / (1.0 + 1.079 / static_cast<double>(m));
  throw unsupported_size_error("alpha_constant: no constant for m=" + std::to_string(m) +
                               " (supported: 16, 32, 64, or >= 128)");
}

struct BetaValue {
  double value;
  bool interpolated;  // true when m is not a tabulated size
};

namespace detail {

// Tabulated beta values; the infinity entry is the 1/m -> 0 limit.
inline constexpr std::size_t kBetaSizes[] = {16, 32, 64, 128};
inline constexpr double kBetaTable[] = {1.106, 1.070, 1.054, 1.046};
inline constexpr double kBetaLimit = 1.039;

}  // namespace detail

// Tabulated beta for m in {16, 32, 64, 128}; otherwise linear interpolation in
// 1/m between the bracketing table entries (or toward the 1.039 limit above
// 128), flagged so reports can mark the value as an approximation.
inline BetaValue beta_constant(std::size_t m) {
  using namespace detail;
  if (m < kBetaSizes[0]) {
    throw unsupported_size_error("beta_constant: no constant for m=" + std::to_string(m) +
                                 " (supported: m >= 16)");
  }
  for (std::size_t i = 0; i < 4; ++i) {
    if (m == kBetaSizes[i]) return {kBetaTable[i], false};
  }
  const double x = 1.0 / static_cast<double>(m);
  for (std::size_t i = 0; i + 1 < 4; ++i) {
    if (m > kBetaSizes[i] && m < kBetaSizes[i + 1]) {
      const double x0 = 1.0 / static_cast<double>(kBetaSizes[i + 1]);
      const double x1 = 1.0 / static_cast<double>(kBetaSizes[i]);
      const double t = (x - x0) / (x1 - x0);
      return {kBetaTable[i + 1] + t * (kBetaTable[i] - kBetaTable[i + 1]), true};
    }
  }
  // m > 128: interpolate between (1/128, 1.046) and (0, 1.039).
  const double t = x / (1.0 / 128.0);
  return {kBetaLimit + t * (kBetaTable[3] - kBetaLimit), true};
}

}  // namespace cardsketch
