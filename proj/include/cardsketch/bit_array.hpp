#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace cardsketch {

// Packed bit array. Bit i lives in word i/64 at position i%64.
class BitArray {
 public:
  explicit BitArray(std::size_t size)
      : size_(size), words_((size + 63) / 64, 0) {
    if (size == 0) throw std::invalid_argument("BitArray: size must be positive");
  }

  std::size_t size() const { return size_; }

  bool test(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1u;
  }

  // Sets bit i; returns true when the bit flipped 0 -> 1.
  bool set(std::size_t i) {
    std::uint64_t& w = words_[i >> 6];
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (w & mask) return false;
    w |= mask;
    return true;
  }

  std::size_t count_zeros() const {
    std::size_t ones = 0;
    for (std::uint64_t w : words_) ones += static_cast<std::size_t>(std::popcount(w));
    return size_ - ones;
  }

  std::span<const std::uint64_t> words() const { return words_; }

  // Raw word write for deserialization; trailing bits past size() must be 0.
  void assign_words(std::span<const std::uint64_t> words) {
    if (words.size() != words_.size()) throw std::invalid_argument("BitArray: word count mismatch");
    words_.assign(words.begin(), words.end());
  }

  friend bool operator==(const BitArray& a, const BitArray& b) {
    return a.size_ == b.size_ && a.words_ == b.words_;
  }

 private:
  std::size_t size_;
  std::vector<std::uint64_t> words_;
};

}  // namespace cardsketch
