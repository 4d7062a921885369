#pragma once

// Accuracy metrics over (estimates, oracle) pairs and their CSV encodings.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "cardsketch/method.hpp"
#include "cardsketch/oracle.hpp"
#include "cardsketch/text.hpp"

namespace cardsketch {

using EstimateMap = std::unordered_map<std::string, double>;

inline double estimate_or_zero(const EstimateMap& est, const std::string& user) {
  const auto it = est.find(user);
  return it == est.end() ? 0.0 : it->second;
}

struct RseRow {
  std::uint64_t n;    // exact cardinality shared by the bucket's users
  std::size_t count;  // users in the bucket
  double rse;         // sqrt(mean(((est - n)/n)^2)) over the bucket
};

// Groups oracle users by exact cardinality and reports the root mean squared
// relative error per group, ascending in n. Users missing from the estimate
// map count as estimate 0. Works with any truth source exposing total() and
// for_each_user(fn(user, n)).
template <class Truth>
inline std::vector<RseRow> rse_by_cardinality(const EstimateMap& estimates,
                                              const Truth& oracle) {
  std::map<std::uint64_t, std::pair<std::size_t, double>> acc;  // n -> (count, sum sq rel err)
  oracle.for_each_user([&](const std::string& user, std::uint64_t n) {
    if (n == 0) return;
    const double rel = (estimate_or_zero(estimates, user) - double(n)) / double(n);
    auto& slot = acc[n];
    slot.first += 1;
    slot.second += rel * rel;
  });
  std::vector<RseRow> rows;
  rows.reserve(acc.size());
  for (const auto& [n, slot] : acc) {
    rows.push_back({n, slot.first, std::sqrt(slot.second / double(slot.first))});
  }
  return rows;
}

inline void write_rse_csv(std::ostream& os, const std::vector<RseRow>& rows) {
  os << "n,count,rse\n";
  for (const auto& r : rows) {
    os << r.n << ',' << r.count << ',' << format_double(r.rse) << '\n';
  }
}

struct DetectionResult {
  double delta;                 // threshold fraction of total distinct pairs
  double threshold;             // delta * total
  std::size_t true_positives;
  std::size_t false_positives;
  std::size_t false_negatives;
  std::size_t true_spreaders;   // |{s : n_s >= threshold}|
  std::size_t users;            // all oracle users
  double fnr;                   // false negatives / true spreaders (0 if none)
  double fpr;                   // false positives / non-spreaders (0 if none)
};

// Super-spreader detection: flag users whose estimate reaches delta * n where
// n is the total distinct-pair count. Negative estimates never reach the
// positive threshold, so no clamping is needed here.
template <class Truth>
inline DetectionResult detect_super_spreaders(const EstimateMap& estimates,
                                              const Truth& oracle, double delta) {
  DetectionResult r{};
  r.delta = delta;
  r.threshold = delta * double(oracle.total());
  oracle.for_each_user([&](const std::string& user, std::uint64_t n) {
    const bool truth = double(n) >= r.threshold;
    const bool flagged = estimate_or_zero(estimates, user) >= r.threshold;
    r.users += 1;
    r.true_spreaders += truth;
    r.true_positives += truth && flagged;
    r.false_positives += !truth && flagged;
    r.false_negatives += truth && !flagged;
  });
  r.fnr = r.true_spreaders == 0 ? 0.0 : double(r.false_negatives) / double(r.true_spreaders);
  const std::size_t negatives = r.users - r.true_spreaders;
  r.fpr = negatives == 0 ? 0.0 : double(r.false_positives) / double(negatives);
  return r;
}

inline void write_detection_header(std::ostream& os) {
  os << "method,delta,fnr,fpr,t\n";
}

inline void write_detection_row(std::ostream& os, Method method, const DetectionResult& r,
                                std::uint64_t t) {
  os << method_name(method) << ',' << format_double(r.delta) << ',' << format_double(r.fnr)
     << ',' << format_double(r.fpr) << ',' << t << '\n';
}

// Per-user estimate dump, sorted by display name for reproducible output.
inline void write_estimates_csv(
    std::ostream& os, const EstimateMap& estimates,
    const std::function<std::string(const std::string&)>& display = nullptr) {
  std::vector<std::pair<std::string, double>> rows;
  rows.reserve(estimates.size());
  for (const auto& [user, est] : estimates) {
    rows.emplace_back(display ? display(user) : user, est);
  }
  std::sort(rows.begin(), rows.end());
  os << "user,estimate\n";
  for (const auto& [user, est] : rows) {
    os << user << ',' << format_double(est) << '\n';
  }
}

}  // namespace cardsketch
