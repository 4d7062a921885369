#pragma once

// Closed-form moment evaluators for the estimators, exact small-case
// combinatorics for the bit-sharing inverse-probability expectation,
// Monte-Carlo cross-checks, and the bit-vs-register memory trade-off solver.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cardsketch/constants.hpp"
#include "cardsketch/errors.hpp"
#include "cardsketch/hashing.hpp"
#include "cardsketch/method.hpp"
#include "cardsketch/register_array.hpp"

namespace cardsketch {

// Coefficient of the register-sharing expectation E(1/q_R) ~ c * n / M.
inline constexpr double kFreeRsExpectationConstant = 1.386;

// Coefficient of the vHLL variance floor ~ c * n * n_s / (M - m).
inline constexpr double kVhllVarianceFloorConstant = 2.163;

struct MomentReport {
  Method method;
  double expectation;
  double variance;
  double n_s;     // target user's cardinality (0 when not applicable)
  double n;       // total distinct pairs
  std::size_t m;  // per-user / virtual size (0 when not applicable)
  std::size_t M;  // shared physical size (0 when not applicable)
  int w;          // register width (0 for bit arrays)
};

// ---- Bit-sharing expectation E(1/q | q > 0) ------------------------------

// Exact value via surjection counting: after n distinct pairs land uniformly
// in M cells, P(exactly j cells occupied) = C(M,j) * Surj(n,j) / M^n with
// Surj(n,j) = Sum_k (-1)^k C(j,k) (j-k)^n, and E(1/q | q > 0) =
// Sum_{j=1}^{min(n, M-1)} P(j) * M/(M-j) / Sum_{j=1}^{min(n, M-1)} P(j);
// the denominator renormalizes over the non-full placements (it is 1 when
// n < M). Exact rational arithmetic; sizes are capped to keep the sum cheap.
inline double freebs_exact_E_inv_q(std::uint64_t n, std::uint64_t M) {
  namespace mp = boost::multiprecision;
  if (n < 1 || M < 2 || n > 64 || M > 64) {
    throw unsupported_size_error("freebs_exact_E_inv_q: requires 1 <= n <= 64 and 2 <= M <= 64");
  }
  auto binom = [](std::uint64_t a, std::uint64_t b) {
    mp::cpp_int r = 1;
    for (std::uint64_t i = 0; i < b; ++i) {
      r *= a - i;
      r /= i + 1;
    }
    return r;
  };
  mp::cpp_rational sum = 0;
  mp::cpp_int mass = 0;
  const std::uint64_t j_max = std::min(n, M - 1);
  for (std::uint64_t j = 1; j <= j_max; ++j) {
    mp::cpp_int surj = 0;
    for (std::uint64_t k = 0; k <= j; ++k) {
      const mp::cpp_int term = binom(j, k) * mp::pow(mp::cpp_int(j - k), unsigned(n));
      surj += k % 2 == 0 ? term : -term;
    }
    const mp::cpp_int ways = binom(M, j) * surj;
    mass += ways;
    sum += mp::cpp_rational(ways * M, mp::cpp_int(M - j));
  }
  sum /= mp::cpp_rational(mass);
  return static_cast<double>(sum);
}

// Taylor approximation e^{n/M} (1 + (e^{n/M} - n/M - 1)/M); tight for n << M ln M.
inline double freebs_approx_E_inv_q(double n, double M) {
  const double u = n / M;
  const double eu = std::exp(u);
  return eu * (1.0 + (eu - u - 1.0) / M);
}

// ---- Register-sharing expectation E(1/q_R) -------------------------------

// Linear regime approximation E(1/q_R) ~ 1.386 n / M, valid once the array
// has left the warm-up zone (n > 2.5 M). Out-of-regime calls throw unless
// explicitly overridden.
inline double freers_approx_E_inv_q(double n, double M, bool allow_out_of_regime = false) {
  if (!(n > 2.5 * M) && !allow_out_of_regime) {
    throw out_of_regime_error("freers_approx_E_inv_q: linear regime requires n > 2.5*M");
  }
  return kFreeRsExpectationConstant * n / M;
}

// ---- Monte-Carlo cross-checks --------------------------------------------

// Empirical E(1/q | q > 0) for a bit array: throw n uniform balls into M
// cells per trial, average M / (zero cells). Trials that fill the array are
// dropped (the conditioning on q > 0).
inline double mc_freebs_E_inv_q(std::uint64_t n, std::size_t M, std::size_t trials,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> cell(M);
  double sum = 0.0;
  std::size_t kept = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    std::fill(cell.begin(), cell.end(), 0);
    std::size_t zeros = M;
    for (std::uint64_t i = 0; i < n; ++i) {
      const std::size_t pos = static_cast<std::size_t>(rng() % M);
      zeros -= !cell[pos];
      cell[pos] = 1;
    }
    if (zeros == 0) continue;
    sum += double(M) / double(zeros);
    ++kept;
  }
  if (kept == 0) throw std::runtime_error("mc_freebs_E_inv_q: every trial saturated");
  return sum / double(kept);
}

// Empirical E(1/q_R) for a register array: throw n geometric ranks into M
// buckets per trial, average M / Sum 2^-R[j].
inline double mc_freers_E_inv_q(std::uint64_t n, std::size_t M, int width, std::size_t trials,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double sum = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    RegisterArray regs(M, width);
    RegisterArray::ScaledSum scaled = regs.term(0) * M;
    for (std::uint64_t i = 0; i < n; ++i) {
      const BucketRank br = split_from_bits(rng(), M);
      const std::size_t pos = static_cast<std::size_t>(br.bucket) - 1;
      const std::uint8_t r = regs.clamp(br.rank);
      const std::uint8_t old = regs.get(pos);
      if (r > old) {
        scaled += regs.term(r) - regs.term(old);
        regs.set(pos, r);
      }
    }
    sum += double(M) / harmonic_sum_value(scaled, width);
  }
  return sum / double(trials);
}

// ---- Per-method moment formulas ------------------------------------------

// Dedicated linear counter of m bits holding n distinct items:
// bias ~ (e^{n/m} - n/m - 1)/2, variance ~ m (e^{n/m} - n/m - 1).
inline MomentReport lpc_moments(double n, std::size_t m) {
  const double t = n / double(m);
  const double g = std::exp(t) - t - 1.0;
  return {Method::lpc, n + 0.5 * g, double(m) * g, n, n, m, 0, 0};
}

// Dedicated HLL of m registers: asymptotically unbiased, RSE ~ beta_m/sqrt(m).
inline MomentReport hll_moments(double n, std::size_t m) {
  const double rse = beta_constant(m).value / std::sqrt(double(m));
  return {Method::hll, n, rse * rse * n * n, n, n, m, 0, 0};
}

// Moment bounds for the shared-array estimators. n_s is the target user's
// cardinality, n the total distinct pairs in the array, m the virtual size
// (unused for the parameter-free methods), M the physical size.
inline MomentReport variance_bounds(Method method, double n_s, double n, std::size_t m,
                                    std::size_t M, int w = 5,
                                    bool allow_out_of_regime = false) {
  switch (method) {
    case Method::freebs: {
      const double e1q = freebs_approx_E_inv_q(n, double(M));
      return {method, n_s, n_s * (e1q - 1.0), n_s, n, 0, M, 0};
    }
    case Method::freers: {
      const double e1q = freers_approx_E_inv_q(n, double(M), allow_out_of_regime);
      return {method, n_s, n_s * (e1q - 1.0), n_s, n, 0, M, w};
    }
    case Method::cse: {
      const double e1q = freebs_approx_E_inv_q(n, double(M));
      const double g = e1q * std::exp(n_s / double(m)) - n_s / double(m) - 1.0;
      return {method, n_s + 0.5 * g, double(m) * g, n_s, n, m, M, 0};
    }
    case Method::vhll: {
      const double md = double(m);
      const double Md = double(M);
      const double scale = Md / (Md - md);
      const double load = n_s + (n - n_s) * md / Md;
      const double v = 1.04 * 1.04 / md * load * load +
                       (n - n_s) * (md / Md) * (1.0 - md / Md) +
                       1.04 * 1.04 * n * n * md * md / (Md * Md * Md);
      return {method, n_s, scale * scale * v, n_s, n, m, M, w};
    }
    case Method::lpc:
      return lpc_moments(n_s, m);
    case Method::hll:
      return hll_moments(n_s, m);
  }
  throw std::invalid_argument("variance_bounds: unknown method");
}

// Register-sharing variance floor in the linear regime, ~ n_s (1.386 n/M - 1).
inline double freers_variance_bound(double n_s, double n, double M,
                                    bool allow_out_of_regime = false) {
  return n_s * (freers_approx_E_inv_q(n, M, allow_out_of_regime) - 1.0);
}

// vHLL variance floor ~ 2.163 n n_s / (M - m), for comparing shared-register
// budgets: same-M registers always cost more variance than register sharing.
inline double vhll_variance_floor(double n_s, double n, double m, double M) {
  return kVhllVarianceFloorConstant * n * n_s / (M - m);
}

// ---- Bit-sharing vs register-sharing trade-off ---------------------------

// Equal memory means a register array of width w holds M/w registers, so
// register sharing wins while w * 1.386 * x < e^x with x = n/M (bits).
// This returns the upper root of e^x = 1.386 w x (bisection, |err| < 1e-9):
// beyond it the bit array's e^x blow-up overtakes and bit sharing loses its
// edge; below it (and above the tiny lower root) bit sharing is cheaper.
inline double freebs_freers_crossover(int w) {
  const double c = kFreeRsExpectationConstant * double(w);
  if (!(c > std::exp(1.0))) {
    throw std::invalid_argument("freebs_freers_crossover: no crossover for w < 2");
  }
  auto f = [c](double x) { return std::exp(x) - c * x; };
  double lo = 1.0;  // f(1) = e - c < 0
  double hi = 2.0;
  while (f(hi) <= 0.0) hi *= 2.0;
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) <= 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// The commonly quoted sufficient load threshold n/M >= 0.772 w (a loose bound
// on the crossover, not the root itself).
inline double freers_advantage_threshold(int w) {
  return 0.772 * double(w);
}

}  // namespace cardsketch
