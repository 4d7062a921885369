#pragma once

// Planted-stream simulator: one target user with a known cardinality inside
// background traffic, replayed over fresh sketches for many trials. Used to
// measure empirical estimator moments against the closed-form bounds.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cardsketch/cse.hpp"
#include "cardsketch/det_rand.hpp"
#include "cardsketch/errors.hpp"
#include "cardsketch/freebs.hpp"
#include "cardsketch/freers.hpp"
#include "cardsketch/hll.hpp"
#include "cardsketch/lpc.hpp"
#include "cardsketch/method.hpp"
#include "cardsketch/vhll.hpp"

namespace cardsketch {

struct EmpiricalMoments {
  double mean = 0.0;
  double variance = 0.0;  // sample variance (Bessel-corrected)
  std::size_t trials = 0;
  std::size_t skipped = 0;  // saturated trials (excluded from the moments)
};

// Measures the target user's estimate over `trials` independent runs:
// the target holds n_s distinct items, background users hold the remaining
// n - n_s pairs, and arrivals are shuffled per trial. LPC/HLL are dedicated
// per-user sketches of size m, so they only see the target's items. m is the
// virtual size for CSE/vHLL and physical_cells the shared M (bits for the bit
// sketches, registers for the register sketches).
inline EmpiricalMoments empirical_moments(Method method, std::uint64_t n_s, std::uint64_t n,
                                          std::size_t m, std::size_t physical_cells, int width,
                                          std::size_t trials, std::uint64_t seed) {
  if (n_s == 0 || n < n_s) throw std::invalid_argument("empirical_moments: need 1 <= n_s <= n");
  if (trials < 2) throw std::invalid_argument("empirical_moments: need at least 2 trials");

  constexpr std::size_t kBackgroundUsers = 16;
  const std::uint64_t n_bg = n - n_s;

  std::vector<std::string> users{"s0"};
  for (std::size_t k = 0; k < kBackgroundUsers; ++k) users.push_back("b" + std::to_string(k));

  // Item name pools, reused across trials (items are distinct within a user).
  const std::uint64_t max_bg = n_bg / kBackgroundUsers + 1;
  std::vector<std::string> target_items, bg_items;
  target_items.reserve(n_s);
  for (std::uint64_t j = 0; j < n_s; ++j) target_items.push_back("t" + std::to_string(j));
  bg_items.reserve(max_bg);
  for (std::uint64_t j = 0; j < max_bg; ++j) bg_items.push_back("x" + std::to_string(j));

  struct Arrival {
    std::uint32_t user;
    std::uint32_t item;
  };
  std::vector<Arrival> arrivals;
  const bool shared = method == Method::freebs || method == Method::freers ||
                      method == Method::cse || method == Method::vhll;
  if (shared) {
    arrivals.reserve(n);
    for (std::uint64_t j = 0; j < n_s; ++j) {
      arrivals.push_back({0, static_cast<std::uint32_t>(j)});
    }
    for (std::size_t k = 0; k < kBackgroundUsers; ++k) {
      const std::uint64_t quota = n_bg / kBackgroundUsers + (k < n_bg % kBackgroundUsers);
      for (std::uint64_t j = 0; j < quota; ++j) {
        arrivals.push_back({static_cast<std::uint32_t>(k + 1), static_cast<std::uint32_t>(j)});
      }
    }
  }

  std::vector<double> samples;
  samples.reserve(trials);
  std::size_t skipped = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const HashSeed trial_seed{mix64(seed ^ (0x9E3779B97F4A7C15ULL * (t + 1)))};
    std::mt19937_64 rng(mix64(trial_seed.value ^ 0xD1B54A32D192ED03ULL));
    try {
      double est = 0.0;
      switch (method) {
        case Method::freebs: {
          fisher_yates(arrivals, rng);
          FreeBsSketch sk(physical_cells, trial_seed);
          for (const Arrival& a : arrivals) {
            sk.update(users[a.user], a.user == 0 ? target_items[a.item] : bg_items[a.item]);
          }
          est = sk.estimate("s0");
          break;
        }
        case Method::freers: {
          fisher_yates(arrivals, rng);
          FreeRsSketch sk(physical_cells, trial_seed, width);
          for (const Arrival& a : arrivals) {
            sk.update(users[a.user], a.user == 0 ? target_items[a.item] : bg_items[a.item]);
          }
          est = sk.estimate("s0");
          break;
        }
        case Method::cse: {
          CseArray sk(physical_cells, m, trial_seed);
          for (const Arrival& a : arrivals) {
            sk.update(users[a.user], a.user == 0 ? target_items[a.item] : bg_items[a.item]);
          }
          est = sk.estimate("s0");
          break;
        }
        case Method::vhll: {
          VhllArray sk(physical_cells, m, trial_seed, width);
          for (const Arrival& a : arrivals) {
            sk.update(users[a.user], a.user == 0 ? target_items[a.item] : bg_items[a.item]);
          }
          est = sk.estimate("s0");
          break;
        }
        case Method::lpc: {
          LpcSketch sk(m, trial_seed);
          for (const std::string& item : target_items) sk.insert(item);
          est = sk.estimate();
          break;
        }
        case Method::hll: {
          HllSketch sk(m, trial_seed, width);
          for (const std::string& item : target_items) sk.insert(item);
          est = sk.estimate();
          break;
        }
      }
      samples.push_back(est);
    } catch (const saturation_error&) {
      ++skipped;
    }
  }

  EmpiricalMoments out;
  out.trials = samples.size();
  out.skipped = skipped;
  if (samples.size() < 2) throw std::runtime_error("empirical_moments: too few usable trials");
  double sum = 0.0;
  for (double v : samples) sum += v;
  out.mean = sum / static_cast<double>(samples.size());
  double ss = 0.0;
  for (double v : samples) ss += (v - out.mean) * (v - out.mean);
  out.variance = ss / static_cast<double>(samples.size() - 1);
  return out;
}

}  // namespace cardsketch
