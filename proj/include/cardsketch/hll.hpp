#pragma once

// HyperLogLog with w-bit registers and the small-range zero-count fallback.

#include <cmath>
#include <cstddef>
#include <string_view>

#include "cardsketch/constants.hpp"
#include "cardsketch/hashing.hpp"
#include "cardsketch/register_array.hpp"

namespace cardsketch {

class HllSketch {
 public:
  HllSketch(std::size_t m, HashSeed seed, int width = 5)
      : m_(m), seed_(seed), alpha_(alpha_constant(m)), regs_(m, width) {}

  std::size_t size() const { return m_; }
  int register_width() const { return regs_.width(); }
  HashSeed seed() const { return seed_; }
  const RegisterArray& registers() const { return regs_; }

  void insert(std::string_view item) {
    const BucketRank br = split_hash(item, m_, seed_);
    const std::size_t i = static_cast<std::size_t>(br.bucket) - 1;
    const std::uint8_t r = regs_.clamp(br.rank);
    if (r > regs_.get(i)) regs_.set(i, r);
  }

  // alpha_m * m^2 / Sum 2^-R[i], before any range correction.
  double raw_estimate() const {
    const double m = static_cast<double>(m_);
    const double sum = harmonic_sum_value(regs_.scaled_harmonic_sum(), regs_.width());
    return alpha_ * m * m / sum;
  }

  std::size_t zero_register_count() const { return regs_.count_zeros(); }

  // Small-range correction: below 2.5m the raw estimate swaps for the linear
  // count -m ln(zeros/m) while any zero register remains.
  double estimate() const {
    const double raw = raw_estimate();
    const double m = static_cast<double>(m_);
    if (raw < 2.5 * m) {
      const std::size_t zeros = regs_.count_zeros();
      if (zeros != 0) return -m * std::log(static_cast<double>(zeros) / m);
    }
    return raw;
  }

  void restore_registers(const RegisterArray& regs) { regs_ = regs; }

  friend bool operator==(const HllSketch& a, const HllSketch& b) {
    return a.m_ == b.m_ && a.seed_.value == b.seed_.value && a.regs_ == b.regs_;
  }

 private:
  std::size_t m_;
  HashSeed seed_;
  double alpha_;
  RegisterArray regs_;
};

}  // namespace cardsketch
