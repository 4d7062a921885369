#pragma once

// Linear probabilistic counter: an m-bit array where each distinct item sets
// one uniform bit; cardinality is estimated from the zero fraction.

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>

#include "cardsketch/bit_array.hpp"
#include "cardsketch/errors.hpp"
#include "cardsketch/hashing.hpp"

namespace cardsketch {

class LpcSketch {
 public:
  LpcSketch(std::size_t m, HashSeed seed)
      : m_(m), seed_(seed), bits_(m), zeros_(m) {}

  std::size_t size() const { return m_; }
  HashSeed seed() const { return seed_; }
  std::size_t zero_count() const { return zeros_; }
  const BitArray& bits() const { return bits_; }

  void insert(std::string_view item) {
    const std::size_t i = static_cast<std::size_t>(uniform_index(item, m_, seed_)) - 1;
    if (bits_.set(i)) --zeros_;
  }

  // -m ln(U/m). U = 0 means the estimator has run off the end of its range;
  // the error carries the largest value it could still report, m ln m.
  double estimate() const {
    if (zeros_ == 0) {
      throw saturation_error(saturation_error::Scope::sketch, max_estimate(m_),
                             "LpcSketch: no zero bits left (estimate capped at m*ln(m))");
    }
    const double m = static_cast<double>(m_);
    return -m * std::log(static_cast<double>(zeros_) / m);
  }

  static double max_estimate(std::size_t m) {
    const double md = static_cast<double>(m);
    return md * std::log(md);
  }

  void restore_bits(const BitArray& bits) {
    bits_ = bits;
    zeros_ = bits_.count_zeros();
  }

  friend bool operator==(const LpcSketch& a, const LpcSketch& b) {
    return a.m_ == b.m_ && a.seed_.value == b.seed_.value && a.bits_ == b.bits_;
  }

 private:
  std::size_t m_;
  HashSeed seed_;
  BitArray bits_;
  std::size_t zeros_;
};

}  // namespace cardsketch
