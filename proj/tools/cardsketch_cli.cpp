// Command-line front end: synthesize streams, replay experiments under an
// equal memory budget, benchmark per-edge update cost, and print
// theory-vs-empirical moment tables. All subcommands are deterministic per
// seed; `run` writes the same artifact files as the library harness.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cardsketch/analysis.hpp"
#include "cardsketch/edge_io.hpp"
#include "cardsketch/harness.hpp"
#include "cardsketch/hashing.hpp"
#include "cardsketch/method.hpp"
#include "cardsketch/simulate.hpp"
#include "cardsketch/stream_gen.hpp"
#include "cardsketch/text.hpp"

namespace {

using namespace cardsketch;

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<Method> out;
  for (const std::string& name : names) {
    const std::optional<Method> m = parse_method(name);
    if (!m) throw CLI::ValidationError("--methods", "unknown method '" + name + "'");
    out.push_back(*m);
  }
  return out;
}

// Generator flags shared by `generate` and `run --users ...`.
struct GeneratorFlags {
  StreamSpec spec;
  std::string order = "shuffled";

  void attach(CLI::App& cmd, bool required) {
    auto* users = cmd.add_option("--users", spec.users, "number of users to draw");
    if (required) users->required();
    cmd.add_option("--zipf", spec.zipf_exponent,
                   "Zipf exponent of the cardinality law (0 = uniform)")
        ->capture_default_str();
    auto* max_card =
        cmd.add_option("--max-card", spec.max_cardinality, "largest per-user cardinality");
    if (required) max_card->required();
    cmd.add_option("--dup", spec.duplicate_factor, "mean arrivals per distinct pair (>= 1)")
        ->capture_default_str();
    cmd.add_option("--order", order, "arrival order: shuffled | clustered")
        ->check(CLI::IsMember({"shuffled", "clustered"}))
        ->capture_default_str();
  }

  StreamSpec resolve(std::uint64_t seed) const {
    StreamSpec s = spec;
    s.order = order == "clustered" ? ArrivalOrder::user_clustered : ArrivalOrder::shuffled;
    s.seed = seed;
    return s;
  }
};

std::string describe(const StreamSpec& s) {
  return "generated:users=" + std::to_string(s.users) +
         ",zipf=" + format_double(s.zipf_exponent) +
         ",max_card=" + std::to_string(s.max_cardinality) +
         ",dup=" + format_double(s.duplicate_factor) +
         ",order=" + (s.order == ArrivalOrder::shuffled ? "shuffled" : "clustered") +
         ",seed=" + std::to_string(s.seed);
}

// Writes to the file when a path is given, else to stdout.
template <class Fn>
void with_output(const std::string& path, Fn&& body) {
  if (path.empty()) {
    body(std::cout);
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  body(os);
}

int cmd_generate(const GeneratorFlags& gen, std::uint64_t seed, const std::string& out) {
  const StreamSpec spec = gen.resolve(seed);
  const InternedStream stream = intern_generated(generate_stream(spec), spec.users);
  write_edge_file(out, stream);
  std::printf("wrote %zu edges (%zu users) to %s\n", stream.edges.size(),
              stream.user_names.size(), out.c_str());
  return 0;
}

int cmd_run(const ExperimentConfig& cfg_in, const std::string& input, const GeneratorFlags& gen,
            bool generator_used) {
  ExperimentConfig cfg = cfg_in;
  InternedStream stream;
  if (!input.empty() && generator_used) {
    throw CLI::ValidationError("--input", "pass either --input or generator flags, not both");
  }
  if (!input.empty()) {
    stream = read_edge_file(input);
    cfg.input_label = input;
  } else if (generator_used) {
    const StreamSpec spec = gen.resolve(cfg.seed);
    stream = intern_generated(generate_stream(spec), spec.users);
    cfg.input_label = describe(spec);
  } else {
    throw CLI::ValidationError("--input", "need --input FILE or generator flags (--users ...)");
  }

  const RunSummary run = run_experiment(cfg, stream);
  std::printf("edges %llu  distinct %llu  users %zu  checkpoints %zu\n",
              static_cast<unsigned long long>(run.edges),
              static_cast<unsigned long long>(run.distinct_pairs), run.users,
              run.checkpoints.size());
  for (const MethodSummary& ms : run.methods) {
    const double rse = ms.mean_rse.empty() ? 0.0 : ms.mean_rse.back().second;
    double fnr = 0.0, fpr = 0.0;
    if (!ms.detection.empty()) {
      fnr = ms.detection.back().second.fnr;
      fpr = ms.detection.back().second.fpr;
    }
    std::printf("%-6s cells %-8llu per-user %-6zu mean-rse %-10.4g fnr %-8.4g fpr %-8.4g%s\n",
                std::string(method_name(ms.method)).c_str(),
                static_cast<unsigned long long>(ms.physical_cells), ms.per_user_size, rse, fnr,
                fpr, ms.saturated ? "  [saturated]" : "");
  }
  if (!cfg.out_dir.empty()) std::printf("artifacts in %s\n", cfg.out_dir.c_str());
  return 0;
}

int cmd_bench(const BenchConfig& cfg, const std::string& out) {
  const std::vector<BenchRow> rows = bench_runtime(cfg);
  with_output(out, [&rows](std::ostream& os) { write_bench_csv(os, rows); });
  return 0;
}

// One theory-vs-empirical row per method at the given load point.
struct AnalyzeParams {
  std::uint64_t memory_bits = 1ull << 20;
  std::size_t m = 1024;
  int width = 5;
  std::vector<Method> methods;
  double n = 0.0;
  double n_s = 0.0;
  std::size_t trials = 400;
  std::uint64_t seed = 1;
  bool allow_out_of_regime = false;
};

void write_analyze_csv(std::ostream& os, const AnalyzeParams& p) {
  os << "method,M,m,w,n,n_s,theory_var,empirical_var,theory_E_inv_q,empirical_E_inv_q\n";
  for (Method method : p.methods) {
    const bool bits = method == Method::freebs || method == Method::cse;
    const bool regs = method == Method::freers || method == Method::vhll;
    const std::size_t M = bits ? std::size_t(p.memory_bits)
                               : std::size_t(p.memory_bits) / std::size_t(p.width);
    const MomentReport theory = variance_bounds(method, p.n_s, p.n, p.m, M, p.width,
                                                p.allow_out_of_regime);
    const EmpiricalMoments emp =
        empirical_moments(method, std::uint64_t(p.n_s), std::uint64_t(p.n), p.m, M, p.width,
                          p.trials, p.seed);

    std::string theory_e1q, emp_e1q;
    if (bits) {
      theory_e1q = format_double(freebs_approx_E_inv_q(p.n, double(M)));
      emp_e1q = format_double(
          mc_freebs_E_inv_q(std::uint64_t(p.n), M, p.trials, mix64(p.seed ^ 0xE19ULL)));
    } else if (regs) {
      theory_e1q = format_double(
          freers_approx_E_inv_q(p.n, double(M), p.allow_out_of_regime));
      emp_e1q = format_double(mc_freers_E_inv_q(std::uint64_t(p.n), M, p.width, p.trials,
                                                mix64(p.seed ^ 0xE19ULL)));
    }
    os << method_name(method) << ',' << theory.M << ',' << theory.m << ',' << theory.w << ','
       << format_double(p.n) << ',' << format_double(p.n_s) << ','
       << format_double(theory.variance) << ',' << format_double(emp.variance) << ','
       << theory_e1q << ',' << emp_e1q << '\n';
  }
}

int cmd_analyze(const AnalyzeParams& p, const std::string& out) {
  with_output(out, [&p](std::ostream& os) { write_analyze_csv(os, p); });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"streaming per-user cardinality sketches: experiments and analysis"};
  app.require_subcommand(1);

  // generate ------------------------------------------------------------------
  auto* generate = app.add_subcommand("generate", "synthesize an edge stream file");
  GeneratorFlags gen_flags;
  gen_flags.attach(*generate, /*required=*/true);
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  generate->add_option("--seed", gen_seed, "stream seed")->capture_default_str();
  generate->add_option("--out", gen_out, "output edge file (.gz compresses)")->required();

  // run -----------------------------------------------------------------------
  auto* run = app.add_subcommand("run", "replay a stream through the selected methods");
  ExperimentConfig run_cfg;
  std::string run_input;
  GeneratorFlags run_gen;
  std::vector<std::string> run_methods;
  run->add_option("--input", run_input, "edge file: user<TAB>item per line (.gz auto)");
  run_gen.attach(*run, /*required=*/false);
  run->add_option("--memory-bits", run_cfg.memory_bits, "total memory budget per method, bits")
      ->capture_default_str();
  run->add_option("--m", run_cfg.virtual_m, "virtual sketch size for CSE/vHLL")
      ->capture_default_str();
  run->add_option("--register-width", run_cfg.register_width, "register width w in bits")
      ->capture_default_str();
  run->add_option("--methods", run_methods, "comma-separated subset of FreeBS,FreeRS,CSE,vHLL,LPC,HLL")
      ->delimiter(',');
  run->add_option("--seed", run_cfg.seed, "hashing/stream seed")->capture_default_str();
  run->add_option("--delta", run_cfg.delta, "super-spreader threshold fraction of the stream")
      ->capture_default_str();
  run->add_option("--checkpoints", run_cfg.checkpoints, "explicit checkpoint edge positions")
      ->delimiter(',');
  run->add_option("--checkpoint-count", run_cfg.checkpoint_count,
                  "evenly spaced checkpoints when --checkpoints is absent")
      ->capture_default_str();
  run->add_flag("--clamp", run_cfg.clamp_negative, "clamp negative estimates to 0 in RSE too");
  run->add_flag("--lean-oracle", run_cfg.lean_oracle,
                "hash-compressed oracle keys (lower memory, same metrics)");
  run->add_option("--out-dir", run_cfg.out_dir, "artifact directory (omit to print summaries only)");

  // bench ---------------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "per-edge update+track cost per method and m");
  BenchConfig bench_cfg;
  std::vector<std::string> bench_methods;
  std::string bench_out;
  bench->add_option("--memory-bits", bench_cfg.memory_bits, "total memory budget, bits")
      ->capture_default_str();
  bench->add_option("--register-width", bench_cfg.register_width, "register width w in bits")
      ->capture_default_str();
  bench->add_option("--methods", bench_methods, "methods to time")->delimiter(',');
  bench->add_option("--m", bench_cfg.m_values, "virtual/per-user sizes to sweep")->delimiter(',');
  bench->add_option("--edges", bench_cfg.edges, "edge operations per measurement")
      ->capture_default_str();
  bench->add_option("--users", bench_cfg.users, "distinct users in the timing stream")
      ->capture_default_str();
  bench->add_option("--seed", bench_cfg.seed, "timing stream seed")->capture_default_str();
  bench->add_option("--out", bench_out, "CSV path (omit for stdout)");

  // analyze -------------------------------------------------------------------
  auto* analyze = app.add_subcommand("analyze", "theory-vs-empirical moment table");
  AnalyzeParams ap;
  std::vector<std::string> analyze_methods;
  std::string analyze_out;
  analyze->add_option("--n", ap.n, "total distinct pairs in the shared array")->required();
  analyze->add_option("--n-s", ap.n_s, "target user's cardinality")->required();
  analyze->add_option("--memory-bits", ap.memory_bits, "total memory budget, bits")
      ->capture_default_str();
  analyze->add_option("--m", ap.m, "virtual/dedicated sketch size")->capture_default_str();
  analyze->add_option("--register-width", ap.width, "register width w in bits")
      ->capture_default_str();
  analyze->add_option("--methods", analyze_methods, "methods to tabulate")->delimiter(',');
  analyze->add_option("--trials", ap.trials, "Monte-Carlo trials per empirical column")
      ->capture_default_str();
  analyze->add_option("--seed", ap.seed, "Monte-Carlo seed")->capture_default_str();
  analyze->add_flag("--allow-out-of-regime", ap.allow_out_of_regime,
                    "evaluate the register linear law below its n > 2.5M regime");
  analyze->add_option("--out", analyze_out, "CSV path (omit for stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) return cmd_generate(gen_flags, gen_seed, gen_out);
    if (*run) {
      if (!run_methods.empty()) run_cfg.methods = parse_methods(run_methods);
      const bool generator_used = run->count("--users") > 0;
      return cmd_run(run_cfg, run_input, run_gen, generator_used);
    }
    if (*bench) {
      if (!bench_methods.empty()) bench_cfg.methods = parse_methods(bench_methods);
      return cmd_bench(bench_cfg, bench_out);
    }
    if (*analyze) {
      ap.methods = analyze_methods.empty()
                       ? std::vector<Method>(kAllMethods.begin(), kAllMethods.end())
                       : parse_methods(analyze_methods);
      return cmd_analyze(ap, analyze_out);
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
