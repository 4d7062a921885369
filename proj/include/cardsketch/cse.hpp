#pragma once

// Compact spread estimator: all users share one M-bit array; user s owns a
// virtual m-bit sketch whose slot i maps to a shared cell drawn uniformly by
// (i, digest(s)). Estimate = virtual linear count minus the shared-noise term.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string_view>

#include "cardsketch/bit_array.hpp"
#include "cardsketch/errors.hpp"
#include "cardsketch/hashing.hpp"
#include "cardsketch/lpc.hpp"

namespace cardsketch {

class CseArray {
 public:
  CseArray(std::size_t physical_bits, std::size_t virtual_bits, HashSeed seed)
      : M_(physical_bits),
        m_(virtual_bits),
        seed_(seed),
        item_seed_(derive_seed(seed, "cse:item")),
        family_seed_(derive_seed(seed, "cse:family")),
        digest_seed_(derive_seed(seed, "cse:user")),
        bits_(physical_bits),
        zeros_(physical_bits) {
    if (m_ == 0) throw std::invalid_argument("CseArray: virtual size must be positive");
    if (m_ > M_) throw std::invalid_argument("CseArray: virtual size exceeds physical size");
  }

  std::size_t physical_size() const { return M_; }
  std::size_t virtual_size() const { return m_; }
  HashSeed seed() const { return seed_; }
  std::size_t zero_count() const { return zeros_; }
  const BitArray& bits() const { return bits_; }

  void update(std::string_view user, std::string_view item) {
    const std::uint32_t slot = static_cast<std::uint32_t>(uniform_index(item, m_, item_seed_));
    const std::uint64_t dig = user_digest(user, digest_seed_);
    const std::size_t pos = static_cast<std::size_t>(virtual_position(dig, slot, M_, family_seed_)) - 1;
    if (bits_.set(pos)) --zeros_;
  }

  // Zero cells among the user's m virtual slots (slots may collide in the
  // shared array; each slot is probed independently).
  std::size_t virtual_zero_count(std::string_view user) const {
    const std::uint64_t dig = user_digest(user, digest_seed_);
    std::size_t z = 0;
    for (std::uint32_t slot = 1; slot <= m_; ++slot) {
      const std::size_t pos =
          static_cast<std::size_t>(virtual_position(dig, slot, M_, family_seed_)) - 1;
      z += !bits_.test(pos);
    }
    return z;
  }

  // -m ln(V_s/m) + m ln(U/M) with V_s the user's virtual zero count and U the
  // shared zero count. Estimates cap at m ln m, carried on the error.
  double estimate(std::string_view user) const {
    if (zeros_ == 0) {
      throw saturation_error(saturation_error::Scope::array, max_estimate(m_),
                             "CseArray: shared array has no zero bits left");
    }
    const std::size_t vz = virtual_zero_count(user);
    if (vz == 0) {
      throw saturation_error(saturation_error::Scope::user, max_estimate(m_),
                             "CseArray: user's virtual sketch has no zero bits left");
    }
    const double m = static_cast<double>(m_);
    const double M = static_cast<double>(M_);
    return -m * std::log(static_cast<double>(vz) / m) +
           m * std::log(static_cast<double>(zeros_) / M);
  }

  static double max_estimate(std::size_t m) { return LpcSketch::max_estimate(m); }

  void restore_bits(const BitArray& bits) {
    bits_ = bits;
    zeros_ = bits_.count_zeros();
  }

 private:
  std::size_t M_;
  std::size_t m_;
  HashSeed seed_;
  HashSeed item_seed_;
  HashSeed family_seed_;
  HashSeed digest_seed_;
  BitArray bits_;
  std::size_t zeros_;
};

}  // namespace cardsketch
