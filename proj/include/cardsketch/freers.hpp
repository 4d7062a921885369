#pragma once

// Register-sharing spread estimator. One M-register array serves every user;
// a pair whose geometric rank beats its bucket's register credits its user
// with 1/q, where q = (Sum_j 2^-R[j])/M is the probability that a fresh pair
// wins its bucket, evaluated on the registers *before* the update. Unlike the
// bit-sharing array, registers keep admitting rarer ranks, so q decays slowly
// and the sketch never saturates.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>

#include "cardsketch/hashing.hpp"
#include "cardsketch/register_array.hpp"
#include "cardsketch/update_outcome.hpp"

namespace cardsketch {

class FreeRsSketch {
 public:
  FreeRsSketch(std::size_t physical_registers, HashSeed seed, int width = 5)
      : M_(physical_registers),
        seed_(seed),
        pair_seed_(derive_seed(seed, "freers:pair")),
        regs_(physical_registers, width),
        scaled_sum_(regs_.term(0) * physical_registers) {}

  std::size_t physical_size() const { return M_; }
  int register_width() const { return regs_.width(); }
  HashSeed seed() const { return seed_; }
  const RegisterArray& registers() const { return regs_; }
  RegisterArray::ScaledSum scaled_sum() const { return scaled_sum_; }

  // q = (Sum_j 2^-R[j]) / M: the probability that a fresh pair's rank beats
  // its bucket's register. Strictly positive even with all registers full.
  double q() const {
    return harmonic_sum_value(scaled_sum_, regs_.width()) / static_cast<double>(M_);
  }

  UpdateOutcome update(std::string_view user, std::string_view item) {
    const std::uint64_t h = pair_hash(user, item, pair_seed_);
    const BucketRank br = split_from_bits(h, M_);
    const std::size_t i = static_cast<std::size_t>(br.bucket) - 1;
    const std::uint8_t r = regs_.clamp(br.rank);
    const std::uint8_t old = regs_.get(i);
    if (r <= old) return {false, 0.0};
    const double inc = 1.0 / q();
    estimates_[std::string(user)] += inc;
    scaled_sum_ += regs_.term(r) - regs_.term(old);
    regs_.set(i, r);
    return {true, inc};
  }

  double estimate(std::string_view user) const {
    const auto it = estimates_.find(std::string(user));
    return it == estimates_.end() ? 0.0 : it->second;
  }

  const std::unordered_map<std::string, double>& estimates() const { return estimates_; }

  // Rebuild array state from a snapshot; running estimates are not part of
  // snapshots and start empty.
  void restore_registers(const RegisterArray& regs) {
    regs_ = regs;
    scaled_sum_ = regs_.scaled_harmonic_sum();
    estimates_.clear();
  }

 private:
  std::size_t M_;
  HashSeed seed_;
  HashSeed pair_seed_;
  RegisterArray regs_;
  RegisterArray::ScaledSum scaled_sum_;
  std::unordered_map<std::string, double> estimates_;
};

}  // namespace cardsketch
