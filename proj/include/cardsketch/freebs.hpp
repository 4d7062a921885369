#pragma once

// Bit-sharing spread estimator. One M-bit array serves every user; a pair
// hashing to a still-zero bit credits its user with the inverse hit
// probability M/m0 (m0 = zero bits *before* the update), so each user's
// running sum is an unbiased cardinality estimate maintained in O(1) per
// update with no per-user parameters.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>

#include "cardsketch/bit_array.hpp"
#include "cardsketch/hashing.hpp"
#include "cardsketch/update_outcome.hpp"

namespace cardsketch {

class FreeBsSketch {
 public:
  FreeBsSketch(std::size_t physical_bits, HashSeed seed)
      : M_(physical_bits),
        seed_(seed),
        pair_seed_(derive_seed(seed, "freebs:pair")),
        bits_(physical_bits),
        zeros_(physical_bits) {}

  std::size_t physical_size() const { return M_; }
  HashSeed seed() const { return seed_; }
  const BitArray& bits() const { return bits_; }
  std::size_t zero_count() const { return zeros_; }

  // Zero fraction q = m0/M: the current probability that a fresh pair lands
  // on a zero bit.
  double q() const { return static_cast<double>(zeros_) / static_cast<double>(M_); }

  // All bits set; every further update is a no-op.
  bool saturated() const { return zeros_ == 0; }

  UpdateOutcome update(std::string_view user, std::string_view item) {
    const std::size_t pos =
        static_cast<std::size_t>(cell_from_bits(pair_hash(user, item, pair_seed_), M_));
    if (!bits_.set(pos)) return {false, 0.0};
    const double inc = static_cast<double>(M_) / static_cast<double>(zeros_);
    --zeros_;
    estimates_[std::string(user)] += inc;
    return {true, inc};
  }

  double estimate(std::string_view user) const {
    const auto it = estimates_.find(std::string(user));
    return it == estimates_.end() ? 0.0 : it->second;
  }

  const std::unordered_map<std::string, double>& estimates() const { return estimates_; }

  // Largest total a single user can accumulate: the increments of a stream
  // that fills the array, M/M + M/(M-1) + ... + M/1 ~ M ln M.
  static double max_total_estimate(std::size_t M) {
    double s = 0.0;
    for (std::size_t m0 = M; m0 > 0; --m0) {
      s += static_cast<double>(M) / static_cast<double>(m0);
    }
    return s;
  }

  // Rebuild array state from a snapshot; running estimates are not part of
  // snapshots and start empty.
  void restore_bits(const BitArray& bits) {
    bits_ = bits;
    zeros_ = bits_.count_zeros();
    estimates_.clear();
  }

 private:
  std::size_t M_;
  HashSeed seed_;
  HashSeed pair_seed_;
  BitArray bits_;
  std::size_t zeros_;
  std::unordered_map<std::string, double> estimates_;
};

}  // namespace cardsketch
