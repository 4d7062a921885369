#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "cardsketch/constants.hpp"
#include "cardsketch/hll.hpp"
#include "cardsketch/lpc.hpp"
#include "cardsketch/snapshot.hpp"

namespace cardsketch {
namespace {

std::string item(std::uint64_t j) { return "item-" + std::to_string(j); }

// ---- constants -------------------------------------------------------------

TEST(Constants, AlphaTableAndFormula) {
  EXPECT_DOUBLE_EQ(alpha_constant(16), 0.673);
  EXPECT_DOUBLE_EQ(alpha_constant(32), 0.697);
  EXPECT_DOUBLE_EQ(alpha_constant(64), 0.709);
  EXPECT_NEAR(alpha_constant(128), 0.71527, 5e-5);   // 0.7213/(1+1.079/128)
  EXPECT_NEAR(alpha_constant(1024), 0.72054, 5e-5);  // formula applies to any m >= 128
  EXPECT_THROW(alpha_constant(15), unsupported_size_error);
  EXPECT_THROW(alpha_constant(17), unsupported_size_error);
  EXPECT_THROW(alpha_constant(100), unsupported_size_error);
  EXPECT_THROW(alpha_constant(0), unsupported_size_error);
}

TEST(Constants, BetaTableInterpolationAndFlag) {
  EXPECT_DOUBLE_EQ(beta_constant(16).value, 1.106);
  EXPECT_FALSE(beta_constant(16).interpolated);
  EXPECT_DOUBLE_EQ(beta_constant(32).value, 1.070);
  EXPECT_DOUBLE_EQ(beta_constant(64).value, 1.054);
  EXPECT_DOUBLE_EQ(beta_constant(128).value, 1.046);
  EXPECT_FALSE(beta_constant(128).interpolated);

  // 1/m-linear interpolation: m=48 sits a third of the way from 64 to 32.
  const BetaValue b48 = beta_constant(48);
  EXPECT_TRUE(b48.interpolated);
  EXPECT_NEAR(b48.value, 1.054 + (1.070 - 1.054) / 3.0, 1e-12);

  // m=256 is halfway (in 1/m) between 128 and the limit 1.039.
  const BetaValue b256 = beta_constant(256);
  EXPECT_TRUE(b256.interpolated);
  EXPECT_NEAR(b256.value, 1.0425, 1e-12);

  // Large m approaches the limit from above.
  EXPECT_NEAR(beta_constant(1 << 20).value, 1.039, 1e-5);
  EXPECT_THROW(beta_constant(15), unsupported_size_error);
}

// ---- LPC -------------------------------------------------------------------

TEST(Lpc, EmptyEstimatesZero) {
  LpcSketch sk(1024, HashSeed{1});
  EXPECT_DOUBLE_EQ(sk.estimate(), 0.0);
  EXPECT_EQ(sk.zero_count(), 1024u);
}

TEST(Lpc, DuplicatesDoNotChangeState) {
  LpcSketch a(256, HashSeed{2});
  LpcSketch b(256, HashSeed{2});
  for (int j = 0; j < 100; ++j) a.insert(item(j));
  for (int rep = 0; rep < 5; ++rep) {
    for (int j = 0; j < 100; ++j) b.insert(item(j));
  }
  EXPECT_TRUE(a == b);
  EXPECT_DOUBLE_EQ(a.estimate(), b.estimate());
}

TEST(Lpc, EstimateMonotoneInInsertions) {
  LpcSketch sk(512, HashSeed{3});
  double prev = 0.0;
  for (int j = 0; j < 400; ++j) {
    sk.insert(item(j));
    const double est = sk.estimate();
    ASSERT_GE(est, prev);
    prev = est;
  }
}

TEST(Lpc, MeanTracksLoadedCounterBias) {
  // m=1024, n=500: expected mean is n + (e^t - t - 1)/2 with t = n/m
  // => 500.0703; variance m(e^t - t - 1) ~ 144 so 300 trials give an SE of
  // 0.69. Accept within 2.5 (>3 SE plus approximation slack).
  constexpr std::size_t m = 1024;
  constexpr int n = 500;
  constexpr int kTrials = 300;
  double sum = 0.0;
  for (int t = 0; t < kTrials; ++t) {
    LpcSketch sk(m, HashSeed{mix64(0xAB00 + std::uint64_t(t))});
    for (int j = 0; j < n; ++j) sk.insert(item(j));
    sum += sk.estimate();
  }
  EXPECT_NEAR(sum / kTrials, 500.07, 2.5);
}

TEST(Lpc, LastZeroBitHitsRangeCapExactly) {
  // With one zero bit left the estimate is -m ln(1/m) = m ln m, the top of
  // the estimation range; losing it throws with that bound attached.
  constexpr std::size_t m = 16;
  LpcSketch sk(m, HashSeed{4});
  std::uint64_t j = 0;
  while (sk.zero_count() > 1) sk.insert(item(j++));
  EXPECT_DOUBLE_EQ(sk.estimate(), LpcSketch::max_estimate(m));
  while (sk.zero_count() > 0) sk.insert(item(j++));
  try {
    sk.estimate();
    FAIL() << "expected saturation_error";
  } catch (const saturation_error& e) {
    EXPECT_EQ(e.scope(), saturation_error::Scope::sketch);
    EXPECT_DOUBLE_EQ(e.bound(), 16.0 * std::log(16.0));
  }
}

TEST(Lpc, RejectsZeroSize) {
  EXPECT_THROW(LpcSketch(0, HashSeed{0}), std::invalid_argument);
}

TEST(Lpc, SnapshotRoundTrip) {
  LpcSketch sk(300, HashSeed{77});
  for (int j = 0; j < 200; ++j) sk.insert(item(j));
  std::stringstream buf;
  save_snapshot(sk, buf);
  const LpcSketch back = load_lpc_snapshot(buf);
  EXPECT_TRUE(sk == back);
  EXPECT_EQ(back.zero_count(), sk.zero_count());
  EXPECT_DOUBLE_EQ(back.estimate(), sk.estimate());
}

// ---- HLL -------------------------------------------------------------------

TEST(Hll, EmptyEstimatesZero) {
  HllSketch sk(64, HashSeed{1});
  EXPECT_DOUBLE_EQ(sk.estimate(), 0.0);
  EXPECT_EQ(sk.zero_register_count(), 64u);
}

TEST(Hll, DuplicatesDoNotChangeState) {
  HllSketch a(64, HashSeed{2});
  HllSketch b(64, HashSeed{2});
  for (int j = 0; j < 500; ++j) a.insert(item(j));
  for (int rep = 0; rep < 3; ++rep) {
    for (int j = 0; j < 500; ++j) b.insert(item(j));
  }
  EXPECT_TRUE(a == b);
}

TEST(Hll, SmallRangeUsesLinearCounting) {
  HllSketch sk(256, HashSeed{5});
  for (int j = 0; j < 10; ++j) sk.insert(item(j));
  const double zeros = double(sk.zero_register_count());
  ASSERT_GT(zeros, 0.0);
  ASSERT_LT(sk.raw_estimate(), 2.5 * 256);
  EXPECT_DOUBLE_EQ(sk.estimate(), -256.0 * std::log(zeros / 256.0));
  EXPECT_NEAR(sk.estimate(), 10.0, 3.0);
}

TEST(Hll, MeanNearTruthAtDepth) {
  // m=256, n=20000 (beyond the small-range switch at 640): 50 trials, RSE
  // ~1.0425/16 = 6.5% => SE of the mean ~184; accept within 3.2 SE.
  constexpr int kTrials = 50;
  constexpr int n = 20'000;
  double sum = 0.0;
  for (int t = 0; t < kTrials; ++t) {
    HllSketch sk(256, HashSeed{mix64(0xCD00 + std::uint64_t(t))});
    for (int j = 0; j < n; ++j) sk.insert(item(j));
    sum += sk.estimate();
  }
  EXPECT_NEAR(sum / kTrials, double(n), 590.0);
}

TEST(Hll, RegisterWidthClampCapsRanks) {
  HllSketch sk(16, HashSeed{6}, 1);
  for (int j = 0; j < 5000; ++j) sk.insert(item(j));
  for (std::size_t i = 0; i < 16; ++i) ASSERT_LE(sk.registers().get(i), 1);
  HllSketch wide(16, HashSeed{6}, 6);
  for (int j = 0; j < 5000; ++j) wide.insert(item(j));
  for (std::size_t i = 0; i < 16; ++i) ASSERT_LE(wide.registers().get(i), 63);
}

TEST(Hll, RejectsUnsupportedSizes) {
  EXPECT_THROW(HllSketch(15, HashSeed{0}), unsupported_size_error);
  EXPECT_THROW(HllSketch(17, HashSeed{0}), unsupported_size_error);
  EXPECT_THROW(HllSketch(127, HashSeed{0}), unsupported_size_error);
  EXPECT_THROW(HllSketch(64, HashSeed{0}, 0), unsupported_size_error);
  EXPECT_THROW(HllSketch(64, HashSeed{0}, 7), unsupported_size_error);
  EXPECT_NO_THROW(HllSketch(200, HashSeed{0}));  // any m >= 128 is fine
}

TEST(Hll, SnapshotRoundTrip) {
  HllSketch sk(128, HashSeed{88}, 5);
  for (int j = 0; j < 3000; ++j) sk.insert(item(j));
  std::stringstream buf;
  save_snapshot(sk, buf);
  const HllSketch back = load_hll_snapshot(buf);
  EXPECT_TRUE(sk == back);
  EXPECT_DOUBLE_EQ(back.estimate(), sk.estimate());
  EXPECT_EQ(back.register_width(), 5);
}

TEST(Snapshot, RejectsCorruptHeaderAndKindMismatch) {
  LpcSketch sk(64, HashSeed{1});
  std::stringstream buf;
  save_snapshot(sk, buf);
  EXPECT_THROW(load_hll_snapshot(buf), std::invalid_argument);  // kind mismatch

  std::stringstream junk("not a snapshot at all");
  EXPECT_THROW(load_lpc_snapshot(junk), std::invalid_argument);

  std::stringstream truncated;
  save_snapshot(sk, truncated);
  std::string bytes = truncated.str();
  bytes.resize(bytes.size() - 4);
  std::stringstream cut(bytes);
  EXPECT_THROW(load_lpc_snapshot(cut), std::invalid_argument);
}

// ---- register array invariants ----------------------------------------------

TEST(RegisterArray, ScaledSumMatchesRecountExactly) {
  RegisterArray regs(333, 5);
  RegisterArray::ScaledSum inc = regs.term(0) * 333;
  std::mt19937_64 rng(42);
  for (int step = 0; step < 10'000; ++step) {
    const std::size_t i = static_cast<std::size_t>(rng() % 333);
    const std::uint8_t r = regs.clamp(int(rng() % 40));
    if (r > regs.get(i)) {
      inc += regs.term(r) - regs.term(regs.get(i));
      regs.set(i, r);
    }
  }
  EXPECT_TRUE(inc == regs.scaled_harmonic_sum());
}

TEST(RegisterArray, WidthBoundsEnforced) {
  EXPECT_THROW(RegisterArray(8, 0), unsupported_size_error);
  EXPECT_THROW(RegisterArray(8, 7), unsupported_size_error);
  EXPECT_NO_THROW(RegisterArray(8, 1));
  EXPECT_NO_THROW(RegisterArray(8, 6));
  EXPECT_THROW(RegisterArray(0, 5), std::invalid_argument);
}

}  // namespace
}  // namespace cardsketch
