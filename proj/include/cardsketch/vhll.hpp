#pragma once

// Virtual HyperLogLog: all users share one M-register array; user s owns m
// virtual registers mapped by (slot, digest(s)). The user's HLL estimate mixes
// their own traffic with everyone else's, so the shared noise is estimated
// from the whole array and subtracted, scaled by M/(M-m).

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string_view>

#include "cardsketch/constants.hpp"
#include "cardsketch/hashing.hpp"
#include "cardsketch/register_array.hpp"

namespace cardsketch {

class VhllArray {
 public:
  struct Estimate {
    double value;
    bool user_small_range;    // user term came from the linear count
    bool global_small_range;  // noise term came from the linear count
    bool global_fallback;     // small-range wanted but no zero registers: raw kept
  };

  VhllArray(std::size_t physical_registers, std::size_t virtual_registers, HashSeed seed,
            int width = 5)
      : M_(physical_registers),
        m_(virtual_registers),
        seed_(seed),
        alpha_m_(alpha_constant(virtual_registers)),
        alpha_M_(alpha_constant(physical_registers)),
        item_seed_(derive_seed(seed, "vhll:item")),
        family_seed_(derive_seed(seed, "vhll:family")),
        digest_seed_(derive_seed(seed, "vhll:user")),
        regs_(physical_registers, width),
        zeros_(physical_registers),
        scaled_sum_(regs_.term(0) * physical_registers) {
    if (m_ >= M_) throw std::invalid_argument("VhllArray: virtual size must be below physical size");
  }

  std::size_t physical_size() const { return M_; }
  std::size_t virtual_size() const { return m_; }
  int register_width() const { return regs_.width(); }
  HashSeed seed() const { return seed_; }
  const RegisterArray& registers() const { return regs_; }
  std::size_t zero_register_count() const { return zeros_; }
  RegisterArray::ScaledSum scaled_sum() const { return scaled_sum_; }

  void update(std::string_view user, std::string_view item) {
    const BucketRank br = split_hash(item, m_, item_seed_);
    const std::uint8_t r = regs_.clamp(br.rank);
    const std::uint64_t dig = user_digest(user, digest_seed_);
    const std::size_t pos = static_cast<std::size_t>(
        virtual_position(dig, static_cast<std::uint32_t>(br.bucket), M_, family_seed_)) - 1;
    const std::uint8_t old = regs_.get(pos);
    if (r > old) {
      scaled_sum_ += regs_.term(r) - regs_.term(old);
      zeros_ -= old == 0;
      regs_.set(pos, r);
    }
  }

  // Whole-array HLL estimate of the total stream cardinality, with the same
  // small-range rule as a plain sketch; `fallback` reports the degenerate
  // small-range-but-no-zeros case where the raw value is kept.
  double global_estimate(bool* small_range = nullptr, bool* fallback = nullptr) const {
    const double M = static_cast<double>(M_);
    const double raw = alpha_M_ * M * M / harmonic_sum_value(scaled_sum_, regs_.width());
    if (small_range) *small_range = false;
    if (fallback) *fallback = false;
    if (raw < 2.5 * M) {
      if (zeros_ != 0) {
        if (small_range) *small_range = true;
        return -M * std::log(static_cast<double>(zeros_) / M);
      }
      if (fallback) *fallback = true;
    }
    return raw;
  }

  Estimate estimate_detail(std::string_view user) const {
    const std::uint64_t dig = user_digest(user, digest_seed_);
    RegisterArray::ScaledSum user_sum = 0;
    std::size_t user_zeros = 0;
    for (std::uint32_t slot = 1; slot <= m_; ++slot) {
      const std::size_t pos =
          static_cast<std::size_t>(virtual_position(dig, slot, M_, family_seed_)) - 1;
      const std::uint8_t v = regs_.get(pos);
      user_sum += regs_.term(v);
      user_zeros += v == 0;
    }
    const double m = static_cast<double>(m_);
    const double M = static_cast<double>(M_);

    Estimate out{0.0, false, false, false};
    double user_term = alpha_m_ * m * m / harmonic_sum_value(user_sum, regs_.width());
    if (user_term < 2.5 * m && user_zeros != 0) {
      user_term = -m * std::log(static_cast<double>(user_zeros) / m);
      out.user_small_range = true;
    }
    const double noise = m / M * global_estimate(&out.global_small_range, &out.global_fallback);
    out.value = M / (M - m) * (user_term - noise);
    return out;
  }

  // May be negative when the noise term overshoots; callers clamp if needed.
  double estimate(std::string_view user) const { return estimate_detail(user).value; }

  void restore_registers(const RegisterArray& regs) {
    regs_ = regs;
    zeros_ = regs_.count_zeros();
    scaled_sum_ = regs_.scaled_harmonic_sum();
  }

 private:
  std::size_t M_;
  std::size_t m_;
  HashSeed seed_;
  double alpha_m_;
  double alpha_M_;
  HashSeed item_seed_;
  HashSeed family_seed_;
  HashSeed digest_seed_;
  RegisterArray regs_;
  std::size_t zeros_;
  RegisterArray::ScaledSum scaled_sum_;
};

}  // namespace cardsketch
