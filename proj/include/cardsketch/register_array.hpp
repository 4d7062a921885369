#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cardsketch/errors.hpp"

namespace cardsketch {

// Array of w-bit max-registers (w in [1,6], so values fit 0..2^w-1).
//
// Harmonic sums Sum_j 2^-R[j] are maintained exactly as the scaled integer
// S = Sum_j 2^(E - R[j]) with E = 2^w - 1; every term is a power of two not
// exceeding 2^63, so a 128-bit accumulator tracks the sum without rounding
// and incremental updates stay bit-identical to a recount.
class RegisterArray {
 public:
  using ScaledSum = unsigned __int128;

  RegisterArray(std::size_t size, int width) : size_(size), width_(width), values_(size, 0) {
    if (size == 0) throw std::invalid_argument("RegisterArray: size must be positive");
    if (width < 1 || width > 6) {
      throw unsupported_size_error("RegisterArray: register width " + std::to_string(width) +
                                   " outside supported range [1,6]");
    }
  }

  std::size_t size() const { return size_; }
  int width() const { return width_; }
  std::uint8_t max_value() const { return static_cast<std::uint8_t>((1u << width_) - 1); }

  std::uint8_t get(std::size_t i) const { return values_[i]; }

  // Clamp an incoming geometric rank to the representable range.
  std::uint8_t clamp(int rank) const {
    const int cap = max_value();
    return static_cast<std::uint8_t>(rank > cap ? cap : rank);
  }

  void set(std::size_t i, std::uint8_t v) { values_[i] = v; }

  // Scaled contribution of one register value: 2^(E - v).
  ScaledSum term(std::uint8_t v) const {
    return ScaledSum{1} << (max_value() - v);
  }

  // Scaled full-array sum; exact. Divide by 2^E to recover Sum 2^-R[j].
  ScaledSum scaled_harmonic_sum() const {
    ScaledSum s = 0;
    for (std::uint8_t v : values_) s += term(v);
    return s;
  }

  std::size_t count_zeros() const {
    std::size_t z = 0;
    for (std::uint8_t v : values_) z += v == 0;
    return z;
  }

  const std::vector<std::uint8_t>& values() const { return values_; }

  void assign(std::span<const std::uint8_t> values) {
    if (values.size() != size_) throw std::invalid_argument("RegisterArray: size mismatch");
    for (std::uint8_t v : values) {
      if (v > max_value()) throw std::invalid_argument("RegisterArray: value exceeds width");
    }
    values_.assign(values.begin(), values.end());
  }

  friend bool operator==(const RegisterArray& a, const RegisterArray& b) {
    return a.width_ == b.width_ && a.values_ == b.values_;
  }

 private:
  std::size_t size_;
  int width_;
  std::vector<std::uint8_t> values_;
};

// Scaled sum -> double value of Sum 2^-R[j].
inline double harmonic_sum_value(RegisterArray::ScaledSum s, int width) {
  const int scale = (1 << width) - 1;
  return std::ldexp(static_cast<double>(s), -scale);
}

}  // namespace cardsketch
