#include "sgspline/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace sgspline;

TEST(GaussRule, LowOrderNodes) {
  const auto one = gauss_rule(1);
  ASSERT_EQ(one.points(), 1);
  EXPECT_DOUBLE_EQ(one.nodes[0], 0.5);
  EXPECT_DOUBLE_EQ(one.weights[0], 1.0);

  const auto two = gauss_rule(2);
  const double off = 1.0 / (2.0 * std::sqrt(3.0));
  EXPECT_NEAR(two.nodes[0], 0.5 - off, 1e-15);
  EXPECT_NEAR(two.nodes[1], 0.5 + off, 1e-15);
  EXPECT_NEAR(two.weights[0], 0.5, 1e-15);
  EXPECT_NEAR(two.weights[1], 0.5, 1e-15);
}

TEST(GaussRule, ExactOnMonomials) {
  for (int n = 1; n <= 16; ++n) {
    const auto rule = gauss_rule(n);
    double wsum = 0.0;
    for (int i = 0; i < n; ++i) {
      EXPECT_GT(rule.weights[i], 0.0);
      EXPECT_GT(rule.nodes[i], 0.0);
      EXPECT_LT(rule.nodes[i], 1.0);
      wsum += rule.weights[i];
    }
    EXPECT_NEAR(wsum, 1.0, 1e-14);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double q = 0.0;
      for (int i = 0; i < n; ++i) q += rule.weights[i] * std::pow(rule.nodes[i], k);
      EXPECT_NEAR(q, 1.0 / (k + 1), 1e-13) << "points=" << n << " k=" << k;
    }
  }
}

TEST(GaussRule, CubicWithTwoPoints) {
  const auto rule = gauss_rule(2);
  double q = 0.0;
  for (int i = 0; i < 2; ++i) q += rule.weights[i] * std::pow(rule.nodes[i], 3);
  EXPECT_NEAR(q, 0.25, 1e-16);
}

TEST(GaussRule, RejectsOutOfRange) {
  EXPECT_THROW(gauss_rule(0), std::invalid_argument);
  EXPECT_THROW(gauss_rule(17), std::invalid_argument);
}

TEST(CompositeRule, IntegratesPiecewiseSmoothFunction) {
  const CompositeRule grid(3, 4);
  EXPECT_EQ(grid.size(), 32u);
  const auto w = grid.weights();
  EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-14);
  // |x - 1/2|^3 is a polynomial on each cell of a dyadic mesh
  double q = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) q += w[i] * std::pow(std::abs(grid.nodes()[i] - 0.5), 3);
  EXPECT_NEAR(q, 2.0 * std::pow(0.5, 4) / 4.0, 1e-15);
  for (std::size_t i = 1; i < grid.size(); ++i) EXPECT_LT(grid.nodes()[i - 1], grid.nodes()[i]);
}
