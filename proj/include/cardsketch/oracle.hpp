#pragma once

// Exact per-user cardinality oracle used as ground truth by the metrics and
// the experiment harness. The memory-lean mode keeps 64-bit item digests per
// user instead of raw item strings (collision odds are negligible at desk
// scale but it is, strictly, an approximation).

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cardsketch/hashing.hpp"

namespace cardsketch {

class ExactOracle {
 public:
  explicit ExactOracle(bool memory_lean = false) : lean_(memory_lean) {}

  bool memory_lean() const { return lean_; }

  // Returns true when (user, item) was never seen before.
  bool observe(std::string_view user, std::string_view item) {
    bool novel;
    if (lean_) {
      auto& set = lean_items_[std::string(user)];
      novel = set.insert(hash64(item, kDigestSeed)).second;
    } else {
      auto& set = items_[std::string(user)];
      novel = set.insert(std::string(item)).second;
    }
    total_ += novel;
    return novel;
  }

  std::uint64_t cardinality(std::string_view user) const {
    const std::string key(user);
    if (lean_) {
      const auto it = lean_items_.find(key);
      return it == lean_items_.end() ? 0 : it->second.size();
    }
    const auto it = items_.find(key);
    return it == items_.end() ? 0 : it->second.size();
  }

  // Total distinct (user, item) pairs seen.
  std::uint64_t total() const { return total_; }

  std::size_t user_count() const { return lean_ ? lean_items_.size() : items_.size(); }

  template <class Fn>  // Fn(const std::string& user, std::uint64_t cardinality)
  void for_each_user(Fn fn) const {
    if (lean_) {
      for (const auto& [user, set] : lean_items_) fn(user, std::uint64_t(set.size()));
    } else {
      for (const auto& [user, set] : items_) fn(user, std::uint64_t(set.size()));
    }
  }

  std::vector<std::string> users_sorted() const {
    std::vector<std::string> out;
    out.reserve(user_count());
    for_each_user([&](const std::string& u, std::uint64_t) { out.push_back(u); });
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  static constexpr HashSeed kDigestSeed{0x9E3779B97F4A7C15ULL};

  bool lean_;
  std::uint64_t total_ = 0;
  std::unordered_map<std::string, std::unordered_set<std::string>> items_;
  std::unordered_map<std::string, std::unordered_set<std::uint64_t>> lean_items_;
};

}  // namespace cardsketch
