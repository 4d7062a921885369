#pragma once

// Synthetic (user, item) streams: per-user cardinalities drawn from a
// truncated Zipf law, optional duplicated arrivals, and a deterministic
// arrival order (fully shuffled or clustered by user). Same spec + seed =>
// same stream, on any platform.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cardsketch/det_rand.hpp"
#include "cardsketch/hashing.hpp"

namespace cardsketch {

enum class ArrivalOrder { shuffled, user_clustered };

struct StreamSpec {
  std::uint64_t users = 0;
  double zipf_exponent = 1.0;        // pmf(k) ~ k^-a over k in [1, max_cardinality]
  std::uint64_t max_cardinality = 1;
  double duplicate_factor = 1.0;     // mean arrivals per distinct pair (>= 1)
  ArrivalOrder order = ArrivalOrder::shuffled;
  std::uint64_t seed = 0;
};

struct Edge {
  std::uint64_t user;
  std::uint64_t item;  // item index within the user's distinct set
};

inline void validate(const StreamSpec& spec) {
  if (spec.zipf_exponent < 0.0) throw std::invalid_argument("StreamSpec: zipf_exponent must be >= 0");
  if (spec.max_cardinality < 1) throw std::invalid_argument("StreamSpec: max_cardinality must be >= 1");
  if (spec.duplicate_factor < 1.0) throw std::invalid_argument("StreamSpec: duplicate_factor must be >= 1");
}

// Per-user distinct cardinalities via inverse-CDF lookup on the truncated
// Zipf mass function.
inline std::vector<std::uint64_t> draw_cardinalities(const StreamSpec& spec) {
  validate(spec);
  std::vector<double> cdf(spec.max_cardinality);
  double z = 0.0;
  for (std::uint64_t k = 1; k <= spec.max_cardinality; ++k) {
    z += std::pow(static_cast<double>(k), -spec.zipf_exponent);
    cdf[k - 1] = z;
  }
  std::mt19937_64 rng(mix64(spec.seed ^ 0x9E3779B97F4A7C15ULL));
  std::vector<std::uint64_t> cards(spec.users);
  for (auto& c : cards) {
    const double target = unit_double(rng) * z;
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), target);
    c = static_cast<std::uint64_t>(it - cdf.begin()) + 1;
  }
  return cards;
}

// Expands cardinalities into an arrival sequence. Each distinct pair appears
// 1 + Poisson(duplicate_factor - 1) times; order is a full shuffle or a
// per-user shuffle of contiguous user blocks.
inline std::vector<Edge> generate_stream(const StreamSpec& spec) {
  const std::vector<std::uint64_t> cards = draw_cardinalities(spec);
  std::mt19937_64 rng(mix64(spec.seed ^ 0xD1B54A32D192ED03ULL));
  std::vector<Edge> edges;
  std::vector<std::size_t> user_begin(spec.users + 1, 0);
  for (std::uint64_t u = 0; u < spec.users; ++u) {
    user_begin[u] = edges.size();
    for (std::uint64_t j = 0; j < cards[u]; ++j) {
      std::uint64_t copies = 1 + poisson_knuth(spec.duplicate_factor - 1.0, rng);
      while (copies-- > 0) edges.push_back({u, j});
    }
  }
  user_begin[spec.users] = edges.size();
  if (spec.order == ArrivalOrder::shuffled) {
    fisher_yates(edges, rng);
  } else {
    for (std::uint64_t u = 0; u < spec.users; ++u) {
      fisher_yates_range(edges.begin() + user_begin[u], edges.begin() + user_begin[u + 1], rng);
    }
  }
  return edges;
}

}  // namespace cardsketch
