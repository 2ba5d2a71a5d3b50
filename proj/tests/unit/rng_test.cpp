#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "effpred/rng.hpp"

using effpred::GaussianStream;

TEST(Rng, Mt19937_64MatchesStandardReferenceValue) {
  // The standard fixes the 10000th output of a default-seeded engine.
  std::mt19937_64 rng;
  rng.discard(9999);
  EXPECT_EQ(rng(), 9981545732273789042ULL);
}

TEST(Rng, UniformBelowStaysInRangeAndCoversIt) {
  std::mt19937_64 rng(7);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto v = effpred::uniform_below(rng, 7);
    ASSERT_LT(v, 7u);
    ++hits[v];
  }
  for (const int h : hits) EXPECT_GT(h, 800);
}

TEST(Rng, BoxMullerFollowsPinnedFormula) {
  std::mt19937_64 raw(42);
  const std::uint64_t a = raw(), b = raw();
  const double u1 = static_cast<double>((a >> 11) + 1) * 0x1.0p-53;
  const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  GaussianStream gauss(42);
  EXPECT_EQ(gauss.next(), r * std::cos(2.0 * M_PI * u2));
  EXPECT_EQ(gauss.next(), r * std::sin(2.0 * M_PI * u2));
}

TEST(Rng, GaussianMomentsAreStandard) {
  GaussianStream gauss(3);
  double sum = 0.0, sq = 0.0;
  constexpr int kN = 200000;
  for (int i = 0; i < kN; ++i) {
    const double z = gauss.next();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / kN, 0.0, 0.01);
  EXPECT_NEAR(sq / kN, 1.0, 0.01);
}

TEST(Rng, DerivedSeedsDiffer) {
  EXPECT_NE(effpred::derive_seed(1, 0), effpred::derive_seed(1, 1));
  EXPECT_NE(effpred::derive_seed(1, 0), effpred::derive_seed(2, 0));
  EXPECT_EQ(effpred::derive_seed(9, 4), effpred::derive_seed(9, 4));
}
