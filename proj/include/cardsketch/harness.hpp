#pragma once

// Experiment harness: replays one edge stream through each selected method
// under an equal total memory budget, tracks per-user running estimates the
// way an online deployment would, and emits accuracy/detection artifacts at
// checkpoints. Each method replays the same buffered stream in isolation, so
// methods never share hash state, and reruns with the same config are
// byte-identical (no timestamps, sorted outputs, deterministic RNG).

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "cardsketch/cse.hpp"
#include "cardsketch/edge_io.hpp"
#include "cardsketch/errors.hpp"
#include "cardsketch/freebs.hpp"
#include "cardsketch/freers.hpp"
#include "cardsketch/hll.hpp"
#include "cardsketch/lpc.hpp"
#include "cardsketch/method.hpp"
#include "cardsketch/metrics.hpp"
#include "cardsketch/oracle.hpp"
#include "cardsketch/text.hpp"
#include "cardsketch/vhll.hpp"

namespace cardsketch {

struct ExperimentConfig {
  std::uint64_t memory_bits = 1ull << 20;  // shared budget per method
  std::size_t virtual_m = 1024;            // CSE/vHLL virtual sketch size
  int register_width = 5;
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
  std::uint64_t seed = 1;
  double delta = 5e-4;                 // super-spreader threshold fraction
  std::size_t checkpoint_count = 10;   // evenly spaced when `checkpoints` empty
  std::vector<std::uint64_t> checkpoints;
  bool clamp_negative = false;  // clamp estimates at 0 in RSE (detection never needs it)
  bool lean_oracle = false;
  std::string out_dir;  // empty: compute summaries only, write nothing
  std::string input_label = "unspecified";
};

struct MethodSummary {
  Method method;
  std::uint64_t physical_cells = 0;  // total bits or registers
  std::size_t per_user_size = 0;     // LPC/HLL dedicated size, CSE/vHLL virtual size
  std::uint64_t saturation_events = 0;
  std::uint64_t global_fallback_events = 0;
  bool saturated = false;  // FreeBS array filled
  // (checkpoint t, mean RSE across cardinality buckets); empty stream -> none
  std::vector<std::pair<std::uint64_t, double>> mean_rse;
  std::vector<std::pair<std::uint64_t, DetectionResult>> detection;
};

struct RunSummary {
  std::uint64_t edges = 0;
  std::uint64_t distinct_pairs = 0;
  std::size_t users = 0;
  std::vector<std::uint64_t> checkpoints;
  std::vector<MethodSummary> methods;
};

namespace detail {

// Truth at a checkpoint: frozen copy of the oracle's view.
struct TruthSnapshot {
  std::uint64_t total_ = 0;
  std::unordered_map<std::string, std::uint64_t> card_;

  std::uint64_t total() const { return total_; }
  template <class Fn>
  void for_each_user(Fn fn) const {
    for (const auto& [user, n] : card_) fn(user, n);
  }
};

// Largest alpha-supported register count not exceeding x.
inline std::size_t round_down_alpha_size(std::size_t x) {
  if (x >= 128) return x;
  if (x >= 64) return 64;
  if (x >= 32) return 32;
  if (x >= 16) return 16;
  throw unsupported_size_error(
      "memory budget leaves fewer than 16 registers per user; HLL needs >= 16");
}

inline std::vector<std::uint64_t> resolve_checkpoints(const ExperimentConfig& cfg,
                                                      std::uint64_t edges) {
  if (!cfg.checkpoints.empty()) {
    std::vector<std::uint64_t> cps = cfg.checkpoints;
    std::sort(cps.begin(), cps.end());
    cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
    if (cps.front() < 1 || cps.back() > edges) {
      throw std::invalid_argument("checkpoints must lie in [1, edge count]");
    }
    return cps;
  }
  if (edges == 0) return {0};  // degenerate run: one empty checkpoint
  const std::size_t k = cfg.checkpoint_count == 0 ? 1 : cfg.checkpoint_count;
  std::vector<std::uint64_t> cps;
  for (std::size_t i = 1; i <= k; ++i) {
    const std::uint64_t t = static_cast<std::uint64_t>(
        static_cast<double>(i) * static_cast<double>(edges) / static_cast<double>(k) + 0.5);
    if (t >= 1 && (cps.empty() || cps.back() != t)) cps.push_back(t);
  }
  if (cps.empty() || cps.back() != edges) cps.push_back(edges);
  return cps;
}

inline EstimateMap clamped(const EstimateMap& est) {
  EstimateMap out = est;
  for (auto& [user, v] : out) {
    if (v < 0.0) v = 0.0;
  }
  return out;
}

inline double mean_rse_over_buckets(const std::vector<RseRow>& rows) {
  if (rows.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : rows) s += r.rse;
  return s / static_cast<double>(rows.size());
}

}  // namespace detail

// Runs every selected method over `stream` and returns the summary; when
// cfg.out_dir is set, also writes per-checkpoint rse_/estimates_ CSVs, a
// shared detection.csv, and the run.json manifest.
inline RunSummary run_experiment(const ExperimentConfig& cfg, const InternedStream& stream) {
  namespace fs = std::filesystem;
  if (cfg.virtual_m == 0) throw std::invalid_argument("virtual_m must be positive");
  if (cfg.delta <= 0.0 || cfg.delta >= 1.0) throw std::invalid_argument("delta must be in (0,1)");

  const std::uint64_t E = stream.edges.size();
  const std::size_t S = stream.user_names.size();
  const std::vector<std::uint64_t> cps = detail::resolve_checkpoints(cfg, E);

  // Oracle pass: exact truth frozen at every checkpoint.
  ExactOracle oracle(cfg.lean_oracle);
  std::vector<detail::TruthSnapshot> truth(cps.size());
  {
    std::size_t ci = 0;
    while (ci < cps.size() && cps[ci] == 0) {
      truth[ci] = {};
      ++ci;
    }
    for (std::uint64_t t = 1; t <= E; ++t) {
      const Edge& e = stream.edges[t - 1];
      oracle.observe(stream.user_names[e.user], stream.item_names[e.item]);
      while (ci < cps.size() && cps[ci] == t) {
        detail::TruthSnapshot& snap = truth[ci];
        snap.total_ = oracle.total();
        snap.card_.reserve(oracle.user_count());
        oracle.for_each_user(
            [&](const std::string& u, std::uint64_t n) { snap.card_.emplace(u, n); });
        ++ci;
      }
    }
  }

  RunSummary summary;
  summary.edges = E;
  summary.distinct_pairs = oracle.total();
  summary.users = S;
  summary.checkpoints = cps;

  const bool writing = !cfg.out_dir.empty();
  std::ofstream detection_csv;
  if (writing) {
    fs::create_directories(cfg.out_dir);
    detection_csv.open(fs::path(cfg.out_dir) / "detection.csv", std::ios::binary);
    write_detection_header(detection_csv);
  }

  const HashSeed base_seed{cfg.seed};
  for (Method method : cfg.methods) {
    const HashSeed method_seed = derive_seed(base_seed, method_name(method));
    MethodSummary ms;
    ms.method = method;

    // Equal-memory resolution: bit methods get the budget as bits, register
    // methods as budget/width registers; dedicated baselines split theirs
    // evenly across the stream's user set.
    const std::uint64_t budget_regs = cfg.memory_bits / static_cast<std::uint64_t>(cfg.register_width);
    EstimateMap counters;

    // Per-method sketch state (only the selected one is instantiated).
    std::unique_ptr<FreeBsSketch> freebs;
    std::unique_ptr<FreeRsSketch> freers;
    std::unique_ptr<CseArray> cse;
    std::unique_ptr<VhllArray> vhll;
    std::unordered_map<std::string, LpcSketch> lpc;
    std::unordered_map<std::string, HllSketch> hll;
    std::size_t lpc_bits_per_user = 0;
    std::size_t hll_regs_per_user = 0;

    switch (method) {
      case Method::freebs:
        ms.physical_cells = cfg.memory_bits;
        freebs = std::make_unique<FreeBsSketch>(cfg.memory_bits, method_seed);
        break;
      case Method::freers:
        if (budget_regs == 0) throw std::invalid_argument("memory budget below one register");
        ms.physical_cells = budget_regs;
        freers = std::make_unique<FreeRsSketch>(budget_regs, method_seed, cfg.register_width);
        break;
      case Method::cse:
        ms.physical_cells = cfg.memory_bits;
        ms.per_user_size = cfg.virtual_m;
        cse = std::make_unique<CseArray>(cfg.memory_bits, cfg.virtual_m, method_seed);
        break;
      case Method::vhll:
        if (budget_regs == 0) throw std::invalid_argument("memory budget below one register");
        ms.physical_cells = budget_regs;
        ms.per_user_size = cfg.virtual_m;
        vhll = std::make_unique<VhllArray>(budget_regs, cfg.virtual_m, method_seed,
                                           cfg.register_width);
        break;
      case Method::lpc: {
        if (S > 0) {
          lpc_bits_per_user = static_cast<std::size_t>(cfg.memory_bits / S);
          if (lpc_bits_per_user == 0) {
            throw std::invalid_argument("memory budget below one bit per user for LPC");
          }
        }
        ms.physical_cells = static_cast<std::uint64_t>(lpc_bits_per_user) * S;
        ms.per_user_size = lpc_bits_per_user;
        break;
      }
      case Method::hll: {
        if (S > 0) {
          hll_regs_per_user = detail::round_down_alpha_size(
              static_cast<std::size_t>(budget_regs / S));
        }
        ms.physical_cells = static_cast<std::uint64_t>(hll_regs_per_user) * S;
        ms.per_user_size = hll_regs_per_user;
        break;
      }
    }

    std::size_t ci = 0;
    auto emit_checkpoint = [&](std::uint64_t t) {
      const EstimateMap* est = &counters;
      if (method == Method::freebs) est = &freebs->estimates();
      if (method == Method::freers) est = &freers->estimates();

      const detail::TruthSnapshot& snap = truth[ci];
      const std::vector<RseRow> rows =
          cfg.clamp_negative ? rse_by_cardinality(detail::clamped(*est), snap)
                             : rse_by_cardinality(*est, snap);
      const DetectionResult det = detect_super_spreaders(*est, snap, cfg.delta);
      ms.mean_rse.emplace_back(t, detail::mean_rse_over_buckets(rows));
      ms.detection.emplace_back(t, det);

      if (writing) {
        const std::string tag =
            std::string(method_name(method)) + "_" + std::to_string(t) + ".csv";
        std::ofstream rse_csv(fs::path(cfg.out_dir) / ("rse_" + tag), std::ios::binary);
        write_rse_csv(rse_csv, rows);
        std::ofstream est_csv(fs::path(cfg.out_dir) / ("estimates_" + tag), std::ios::binary);
        write_estimates_csv(est_csv, *est);
        write_detection_row(detection_csv, method, det, t);
      }
    };

    while (ci < cps.size() && cps[ci] == 0) {
      emit_checkpoint(0);
      ++ci;
    }
    for (std::uint64_t t = 1; t <= E; ++t) {
      const Edge& e = stream.edges[t - 1];
      const std::string& user = stream.user_names[e.user];
      const std::string& item = stream.item_names[e.item];
      switch (method) {
        case Method::freebs:
          ms.saturation_events += freebs->saturated();
          freebs->update(user, item);
          break;
        case Method::freers:
          freers->update(user, item);
          break;
        case Method::cse: {
          cse->update(user, item);
          try {
            counters[user] = cse->estimate(user);
          } catch (const saturation_error&) {
            ++ms.saturation_events;  // counter keeps its last good value
          }
          break;
        }
        case Method::vhll: {
          vhll->update(user, item);
          const VhllArray::Estimate est = vhll->estimate_detail(user);
          ms.global_fallback_events += est.global_fallback;
          counters[user] = est.value;
          break;
        }
        case Method::lpc: {
          auto it = lpc.find(user);
          if (it == lpc.end()) {
            it = lpc.emplace(user, LpcSketch(lpc_bits_per_user, derive_seed(method_seed, user)))
                     .first;
          }
          it->second.insert(item);
          try {
            counters[user] = it->second.estimate();
          } catch (const saturation_error&) {
            ++ms.saturation_events;
          }
          break;
        }
        case Method::hll: {
          auto it = hll.find(user);
          if (it == hll.end()) {
            it = hll.emplace(user, HllSketch(hll_regs_per_user, derive_seed(method_seed, user),
                                             cfg.register_width))
                     .first;
          }
          it->second.insert(item);
          counters[user] = it->second.estimate();
          break;
        }
      }
      while (ci < cps.size() && cps[ci] == t) {
        emit_checkpoint(t);
        ++ci;
      }
    }

    if (method == Method::freebs) ms.saturated = freebs->saturated();
    summary.methods.push_back(std::move(ms));
  }

  if (writing) {
    nlohmann::ordered_json j;
    j["config"] = {
        {"memory_bits", cfg.memory_bits},
        {"virtual_m", cfg.virtual_m},
        {"register_width", cfg.register_width},
        {"methods", [&] {
           std::vector<std::string> names;
           for (Method m : cfg.methods) names.emplace_back(method_name(m));
           return names;
         }()},
        {"seed", cfg.seed},
        {"delta", cfg.delta},
        {"checkpoint_count", cfg.checkpoint_count},
        {"clamp_negative", cfg.clamp_negative},
        {"lean_oracle", cfg.lean_oracle},
        {"input", cfg.input_label},
    };
    j["stream"] = {
        {"edges", summary.edges},
        {"distinct_pairs", summary.distinct_pairs},
        {"users", summary.users},
        {"items", stream.item_names.size()},
    };
    j["checkpoints"] = summary.checkpoints;
    nlohmann::ordered_json jm = nlohmann::ordered_json::array();
    for (const MethodSummary& ms : summary.methods) {
      jm.push_back({
          {"method", method_name(ms.method)},
          {"physical_cells", ms.physical_cells},
          {"per_user_size", ms.per_user_size},
          {"saturation_events", ms.saturation_events},
          {"global_fallback_events", ms.global_fallback_events},
          {"saturated", ms.saturated},
      });
    }
    j["methods"] = jm;
    std::ofstream manifest(fs::path(cfg.out_dir) / "run.json", std::ios::binary);
    manifest << j.dump(2) << '\n';
  }
  return summary;
}

// ---- Runtime benchmark -----------------------------------------------------

struct BenchConfig {
  std::uint64_t memory_bits = 1ull << 22;
  int register_width = 5;
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
  std::vector<std::size_t> m_values{128, 1024};
  std::uint64_t edges = 1'000'000;
  std::uint64_t users = 1024;
  std::uint64_t seed = 1;
};

struct BenchRow {
  Method method;
  std::size_t m;  // virtual / per-user size (ignored by the free methods)
  std::uint64_t edges;
  double ns_per_edge;  // mean update+track cost
};

namespace detail {

// One timed pass of `method` over the synthetic stream. Tracking mirrors the
// harness: dedicated/virtual baselines re-estimate the arriving user every
// edge; free methods carry their counters inside the update.
inline double bench_pass(Method method, std::size_t m, const BenchConfig& cfg,
                         const std::vector<std::string>& users, std::uint64_t edges,
                         HashSeed seed) {
  const std::uint64_t budget_regs =
      cfg.memory_bits / static_cast<std::uint64_t>(cfg.register_width);
  EstimateMap counters;
  double sink = 0.0;

  const auto item_name = [](std::uint64_t i) { return "i" + std::to_string(i); };
  const auto t0 = std::chrono::steady_clock::now();
  switch (method) {
    case Method::freebs: {
      FreeBsSketch sk(cfg.memory_bits, seed);
      for (std::uint64_t t = 0; t < edges; ++t) {
        sink += sk.update(users[t % users.size()], item_name(t / users.size())).increment;
      }
      break;
    }
    case Method::freers: {
      FreeRsSketch sk(budget_regs, seed, cfg.register_width);
      for (std::uint64_t t = 0; t < edges; ++t) {
        sink += sk.update(users[t % users.size()], item_name(t / users.size())).increment;
      }
      break;
    }
    case Method::cse: {
      CseArray sk(cfg.memory_bits, m, seed);
      for (std::uint64_t t = 0; t < edges; ++t) {
        const std::string& u = users[t % users.size()];
        sk.update(u, item_name(t / users.size()));
        try {
          counters[u] = sk.estimate(u);
        } catch (const saturation_error&) {
        }
      }
      break;
    }
    case Method::vhll: {
      VhllArray sk(budget_regs, m, seed, cfg.register_width);
      for (std::uint64_t t = 0; t < edges; ++t) {
        const std::string& u = users[t % users.size()];
        sk.update(u, item_name(t / users.size()));
        counters[u] = sk.estimate(u);
      }
      break;
    }
    case Method::lpc: {
      std::unordered_map<std::string, LpcSketch> sk;
      for (std::uint64_t t = 0; t < edges; ++t) {
        const std::string& u = users[t % users.size()];
        auto it = sk.find(u);
        if (it == sk.end()) it = sk.emplace(u, LpcSketch(m, derive_seed(seed, u))).first;
        it->second.insert(item_name(t / users.size()));
        try {
          counters[u] = it->second.estimate();
        } catch (const saturation_error&) {
        }
      }
      break;
    }
    case Method::hll: {
      std::unordered_map<std::string, HllSketch> sk;
      for (std::uint64_t t = 0; t < edges; ++t) {
        const std::string& u = users[t % users.size()];
        auto it = sk.find(u);
        if (it == sk.end()) {
          it = sk.emplace(u, HllSketch(m, derive_seed(seed, u), cfg.register_width)).first;
        }
        it->second.insert(item_name(t / users.size()));
        counters[u] = it->second.estimate();
      }
      break;
    }
  }
  const auto t1 = std::chrono::steady_clock::now();
  // Fold the sinks into the result so the passes cannot be optimized out.
  volatile double guard = sink + static_cast<double>(counters.size());
  (void)guard;
  return std::chrono::duration<double, std::nano>(t1 - t0).count() /
         static_cast<double>(edges);
}

}  // namespace detail

// Mean per-edge update+track cost per (method, m). A warm-up pass over a
// prefix runs first and is discarded.
inline std::vector<BenchRow> bench_runtime(const BenchConfig& cfg) {
  if (cfg.users == 0 || cfg.edges == 0) throw std::invalid_argument("bench needs users and edges");
  std::vector<std::string> users;
  users.reserve(cfg.users);
  for (std::uint64_t u = 0; u < cfg.users; ++u) users.push_back("u" + std::to_string(u));

  std::vector<BenchRow> rows;
  const HashSeed base{cfg.seed};
  for (Method method : cfg.methods) {
    for (std::size_t m : cfg.m_values) {
      const HashSeed seed = derive_seed(base, std::string(method_name(method)) + ":" +
                                                  std::to_string(m));
      const std::uint64_t warm = std::min<std::uint64_t>(cfg.edges / 10 + 1, 100'000);
      detail::bench_pass(method, m, cfg, users, warm, seed);  // warm-up, discarded
      const double ns = detail::bench_pass(method, m, cfg, users, cfg.edges, seed);
      rows.push_back({method, m, cfg.edges, ns});
    }
  }
  return rows;
}

inline void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "method,m,edges,ns_per_edge\n";
  for (const BenchRow& r : rows) {
    os << method_name(r.method) << ',' << r.m << ',' << r.edges << ','
       << format_double(r.ns_per_edge) << '\n';
  }
}

}  // namespace cardsketch
