#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "effpred/error.hpp"
#include "effpred/stats.hpp"

using namespace effpred::stats;

TEST(Stats, MedianOddAndEven) {
  EXPECT_DOUBLE_EQ(median(std::vector<double>{3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(median(std::vector<double>{4, 1, 3, 2}), 2.5);
  EXPECT_DOUBLE_EQ(median(std::vector<double>{7}), 7.0);
  EXPECT_THROW(median(std::vector<double>{}), effpred::Error);
}

TEST(Stats, AverageRanksHandleTies) {
  const auto r = average_ranks(std::vector<double>{10, 20, 20, 5});
  EXPECT_EQ(r, (std::vector<double>{2, 3.5, 3.5, 1}));
}

TEST(Stats, SpearmanMonotoneAndInvariant) {
  std::vector<double> x{0.1, 0.4, 0.2, 0.9, 0.5};
  std::vector<double> y{1, 4, 2, 9, 5};
  EXPECT_DOUBLE_EQ(*spearman(x, y), 1.0);
  std::vector<double> fx;
  for (double v : x) fx.push_back(std::exp(3 * v) - 7);
  EXPECT_DOUBLE_EQ(*spearman(fx, y), *spearman(x, y));
  std::vector<double> rev{9, 5, 4, 2, 1};
  std::vector<double> inc{1, 2, 3, 4, 5};
  EXPECT_DOUBLE_EQ(*spearman(inc, rev), -1.0);
  EXPECT_FALSE(spearman(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}).has_value());
}

TEST(Stats, StudentsTTwoSided) {
  EXPECT_NEAR(students_t_two_sided_p(0.0, 10), 1.0, 1e-12);
  // t = 2.228 is the 97.5% quantile at 10 degrees of freedom.
  EXPECT_NEAR(students_t_two_sided_p(2.228138852, 10), 0.05, 1e-6);
  EXPECT_EQ(students_t_two_sided_p(INFINITY, 3), 0.0);
}
