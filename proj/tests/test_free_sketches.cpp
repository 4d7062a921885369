#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cardsketch/freebs.hpp"
#include "cardsketch/freers.hpp"
#include "cardsketch/snapshot.hpp"

namespace cardsketch {
namespace {

std::string item(std::uint64_t j) { return "i" + std::to_string(j); }

// ---- FreeBS ------------------------------------------------------------------

TEST(FreeBs, FirstIncrementIsExactlyOne) {
  FreeBsSketch sk(8, HashSeed{1});
  const UpdateOutcome out = sk.update("alice", "x");
  ASSERT_TRUE(out.modified);
  EXPECT_DOUBLE_EQ(out.increment, 1.0);  // M/m0 = 8/8
  EXPECT_EQ(sk.zero_count(), 7u);
  EXPECT_DOUBLE_EQ(sk.estimate("alice"), 1.0);
}

TEST(FreeBs, IncrementsUsePreUpdateZeroCount) {
  // Every modified update must credit exactly M / (zero bits before the
  // update), and duplicates must be strict no-ops.
  FreeBsSketch sk(64, HashSeed{2});
  double expected_total = 0.0;
  for (std::uint64_t j = 0; j < 200; ++j) {
    const std::size_t zeros_before = sk.zero_count();
    const UpdateOutcome out = sk.update("alice", item(j));
    if (out.modified) {
      EXPECT_DOUBLE_EQ(out.increment, 64.0 / double(zeros_before));
      expected_total += 64.0 / double(zeros_before);
    } else {
      EXPECT_DOUBLE_EQ(out.increment, 0.0);
    }
    const UpdateOutcome dup = sk.update("alice", item(j));
    EXPECT_FALSE(dup.modified);
    EXPECT_EQ(sk.bits().count_zeros(), sk.zero_count());  // cached count exact
  }
  EXPECT_DOUBLE_EQ(sk.estimate("alice"), expected_total);
}

TEST(FreeBs, DuplicatesNeverChangeEstimates) {
  FreeBsSketch once(256, HashSeed{3});
  FreeBsSketch thrice(256, HashSeed{3});
  for (std::uint64_t j = 0; j < 120; ++j) once.update("u", item(j));
  for (int rep = 0; rep < 3; ++rep) {
    for (std::uint64_t j = 0; j < 120; ++j) thrice.update("u", item(j));
  }
  EXPECT_TRUE(once.bits() == thrice.bits());
  EXPECT_DOUBLE_EQ(once.estimate("u"), thrice.estimate("u"));
}

TEST(FreeBs, QTracksZeroFraction) {
  FreeBsSketch sk(32, HashSeed{4});
  EXPECT_DOUBLE_EQ(sk.q(), 1.0);
  for (std::uint64_t j = 0; j < 50; ++j) {
    sk.update("u", item(j));
    EXPECT_DOUBLE_EQ(sk.q(), double(sk.zero_count()) / 32.0);
  }
}

TEST(FreeBs, SaturatingStreamRealizesFullRangeExactly) {
  // Filling the whole array accumulates M/M + M/(M-1) + ... + M/1 in that
  // order; the estimate must hit the range cap bit-for-bit and the sketch
  // must flag saturation and become a no-op.
  constexpr std::size_t M = 64;
  FreeBsSketch sk(M, HashSeed{5});
  std::uint64_t j = 0;
  while (!sk.saturated() && j < 100'000) sk.update("hog", item(j++));
  ASSERT_TRUE(sk.saturated());
  EXPECT_EQ(sk.zero_count(), 0u);
  EXPECT_DOUBLE_EQ(sk.q(), 0.0);
  EXPECT_DOUBLE_EQ(sk.estimate("hog"), FreeBsSketch::max_total_estimate(M));

  const double frozen = sk.estimate("hog");
  const UpdateOutcome out = sk.update("hog", "fresh-item-after-saturation");
  EXPECT_FALSE(out.modified);
  EXPECT_DOUBLE_EQ(out.increment, 0.0);
  EXPECT_DOUBLE_EQ(sk.estimate("hog"), frozen);
}

TEST(FreeBs, MaxTotalEstimateIsHarmonicSum) {
  // ~ M ln M: for M=64, sum = 64 * H_64 = 64 * 4.7439 = 303.6.
  EXPECT_NEAR(FreeBsSketch::max_total_estimate(64), 303.6, 0.1);
  EXPECT_DOUBLE_EQ(FreeBsSketch::max_total_estimate(1), 1.0);
}

TEST(FreeBs, PerUserEstimatesAreIndependentSums) {
  FreeBsSketch sk(512, HashSeed{6});
  double alice = 0.0, bob = 0.0;
  for (std::uint64_t j = 0; j < 150; ++j) {
    alice += sk.update("alice", item(j)).increment;
    bob += sk.update("bob", item(j)).increment;  // same item names, distinct pairs
  }
  EXPECT_DOUBLE_EQ(sk.estimate("alice"), alice);
  EXPECT_DOUBLE_EQ(sk.estimate("bob"), bob);
  EXPECT_DOUBLE_EQ(sk.estimate("carol"), 0.0);
  EXPECT_EQ(sk.estimates().size(), 2u);
}

TEST(FreeBs, MeanIsUnbiasedForSmallUser) {
  // n_s = 20 in an M=64 array: variance ~ n_s (E(1/q) - 1) ~ 7.5, so 2000
  // trials give SE ~0.06; accept within 0.25.
  constexpr int kTrials = 2000;
  double sum = 0.0;
  for (int t = 0; t < kTrials; ++t) {
    FreeBsSketch sk(64, HashSeed{mix64(0xF00 + std::uint64_t(t))});
    for (std::uint64_t j = 0; j < 20; ++j) sk.update("u", item(j));
    sum += sk.estimate("u");
  }
  EXPECT_NEAR(sum / kTrials, 20.0, 0.25);
}

TEST(FreeBs, SnapshotRestoresArrayButNotEstimates) {
  FreeBsSketch sk(128, HashSeed{7});
  for (std::uint64_t j = 0; j < 60; ++j) sk.update("u", item(j));
  std::stringstream buf;
  save_snapshot(sk, buf);
  const FreeBsSketch back = load_freebs_snapshot(buf);
  EXPECT_TRUE(back.bits() == sk.bits());
  EXPECT_EQ(back.zero_count(), sk.zero_count());
  EXPECT_DOUBLE_EQ(back.q(), sk.q());
  EXPECT_DOUBLE_EQ(back.estimate("u"), 0.0);  // estimates live outside snapshots
}

// ---- FreeRS ------------------------------------------------------------------

TEST(FreeRs, FirstIncrementIsExactlyOne) {
  FreeRsSketch sk(8, HashSeed{1});
  const UpdateOutcome out = sk.update("alice", "x");
  ASSERT_TRUE(out.modified);
  EXPECT_DOUBLE_EQ(out.increment, 1.0);  // q starts at 1
}

TEST(FreeRs, IncrementsUsePreUpdateRegisters) {
  // 1/q must be computed from the registers before the update is applied,
  // and the running scaled sum must stay bit-identical to a recount.
  FreeRsSketch sk(32, HashSeed{2}, 5);
  double expected_alice = 0.0;
  for (std::uint64_t j = 0; j < 3000; ++j) {
    const double q_before =
        harmonic_sum_value(sk.registers().scaled_harmonic_sum(), 5) / 32.0;
    const UpdateOutcome out = sk.update("alice", item(j));
    if (out.modified) {
      EXPECT_DOUBLE_EQ(out.increment, 1.0 / q_before);
      expected_alice += 1.0 / q_before;
    } else {
      EXPECT_DOUBLE_EQ(out.increment, 0.0);
    }
    ASSERT_TRUE(sk.scaled_sum() == sk.registers().scaled_harmonic_sum());
  }
  EXPECT_DOUBLE_EQ(sk.estimate("alice"), expected_alice);
}

TEST(FreeRs, DuplicatesNeverChangeEstimates) {
  FreeRsSketch once(64, HashSeed{3});
  FreeRsSketch thrice(64, HashSeed{3});
  for (std::uint64_t j = 0; j < 300; ++j) once.update("u", item(j));
  for (int rep = 0; rep < 3; ++rep) {
    for (std::uint64_t j = 0; j < 300; ++j) thrice.update("u", item(j));
  }
  EXPECT_TRUE(once.registers() == thrice.registers());
  EXPECT_DOUBLE_EQ(once.estimate("u"), thrice.estimate("u"));
}

TEST(FreeRs, NeverSaturates) {
  // Even with every register at its cap, q stays strictly positive and the
  // sketch keeps answering.
  FreeRsSketch sk(16, HashSeed{4}, 1);  // width 1: registers cap at 1
  for (std::uint64_t j = 0; j < 5000; ++j) sk.update("hog", item(j));
  for (std::size_t i = 0; i < 16; ++i) ASSERT_EQ(sk.registers().get(i), 1);
  EXPECT_DOUBLE_EQ(sk.q(), 0.5);  // all registers at 1: q = 2^-1
  const UpdateOutcome out = sk.update("hog", "one-more");
  EXPECT_FALSE(out.modified);  // rank 1 never beats 1
  EXPECT_GT(sk.q(), 0.0);
}

TEST(FreeRs, PerUserEstimatesAreIndependentSums) {
  FreeRsSketch sk(256, HashSeed{5});
  double alice = 0.0, bob = 0.0;
  for (std::uint64_t j = 0; j < 200; ++j) {
    alice += sk.update("alice", item(j)).increment;
    bob += sk.update("bob", item(j)).increment;
  }
  EXPECT_DOUBLE_EQ(sk.estimate("alice"), alice);
  EXPECT_DOUBLE_EQ(sk.estimate("bob"), bob);
  EXPECT_DOUBLE_EQ(sk.estimate("carol"), 0.0);
}

TEST(FreeRs, MeanIsUnbiasedForSmallUser) {
  // n_s = 30 in an M=64 register array: variance ~ 12 => SE(2000) ~0.08;
  // accept within 0.35.
  constexpr int kTrials = 2000;
  double sum = 0.0;
  for (int t = 0; t < kTrials; ++t) {
    FreeRsSketch sk(64, HashSeed{mix64(0x1F00 + std::uint64_t(t))});
    for (std::uint64_t j = 0; j < 30; ++j) sk.update("u", item(j));
    sum += sk.estimate("u");
  }
  EXPECT_NEAR(sum / kTrials, 30.0, 0.35);
}

TEST(FreeRs, WidthBoundsRespected) {
  EXPECT_THROW(FreeRsSketch(64, HashSeed{0}, 0), unsupported_size_error);
  EXPECT_THROW(FreeRsSketch(64, HashSeed{0}, 7), unsupported_size_error);
  FreeRsSketch wide(64, HashSeed{0}, 6);
  for (std::uint64_t j = 0; j < 10'000; ++j) wide.update("u", item(j));
  for (std::size_t i = 0; i < 64; ++i) ASSERT_LE(wide.registers().get(i), 63);
}

TEST(FreeRs, SnapshotRestoresArrayButNotEstimates) {
  FreeRsSketch sk(128, HashSeed{6}, 5);
  for (std::uint64_t j = 0; j < 500; ++j) sk.update("u", item(j));
  std::stringstream buf;
  save_snapshot(sk, buf);
  const FreeRsSketch back = load_freers_snapshot(buf);
  EXPECT_TRUE(back.registers() == sk.registers());
  EXPECT_TRUE(back.scaled_sum() == sk.scaled_sum());
  EXPECT_DOUBLE_EQ(back.q(), sk.q());
  EXPECT_DOUBLE_EQ(back.estimate("u"), 0.0);
}

// Arrival order changes intermediate increments but not array state; the
// final per-user estimate stays unbiased either way, and equal streams in
// equal order reproduce estimates exactly.
TEST(FreeSketches, ReplayIsDeterministic) {
  FreeBsSketch a(512, HashSeed{8});
  FreeBsSketch b(512, HashSeed{8});
  FreeRsSketch c(512, HashSeed{8});
  FreeRsSketch d(512, HashSeed{8});
  for (std::uint64_t j = 0; j < 400; ++j) {
    const std::string u = "u" + std::to_string(j % 7);
    a.update(u, item(j));
    b.update(u, item(j));
    c.update(u, item(j));
    d.update(u, item(j));
  }
  for (int k = 0; k < 7; ++k) {
    const std::string u = "u" + std::to_string(k);
    EXPECT_DOUBLE_EQ(a.estimate(u), b.estimate(u));
    EXPECT_DOUBLE_EQ(c.estimate(u), d.estimate(u));
  }
}

}  // namespace
}  // namespace cardsketch
