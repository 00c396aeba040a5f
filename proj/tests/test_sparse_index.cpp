#include "sgspline/sparse_index.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

using namespace sgspline;

namespace {

// Pascal's triangle in 64-bit integers.
long long pascal(long long n, long long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  std::vector<long long> row{1};
  for (long long i = 1; i <= n; ++i) {
    std::vector<long long> next(i + 1, 1);
    for (long long j = 1; j < i; ++j) next[j] = row[j - 1] + row[j];
    row = std::move(next);
  }
  return row[k];
}

// Every level in [lo, hi]^d, filtered by a predicate.
std::vector<MultiIndex> brute_levels(int d, int lo, int hi, const std::function<bool(const MultiIndex&)>& keep) {
  std::vector<MultiIndex> out;
  MultiIndex l(d, lo);
  while (true) {
    if (keep(l)) out.push_back(l);
    int k = d - 1;
    while (k >= 0 && ++l[k] > hi) l[k--] = lo;
    if (k < 0) break;
  }
  return out;
}

int sum(const MultiIndex& l) {
  int s = 0;
  for (int v : l) s += v;
  return s;
}

}  // namespace

TEST(LambdaEff, SmallestLevelWithMeshTimesDegreeBelowOne) {
  EXPECT_EQ(lambda_eff(0), 1);
  EXPECT_EQ(lambda_eff(1), 1);
  EXPECT_EQ(lambda_eff(2), 2);
  EXPECT_EQ(lambda_eff(3), 2);
  EXPECT_EQ(lambda_eff(4), 3);
  EXPECT_EQ(lambda_eff(7), 3);
  EXPECT_EQ(lambda_eff(8), 4);
  for (int p = 2; p <= 40; ++p) {
    const int l = lambda_eff(p);
    EXPECT_LT(p * std::ldexp(1.0, -l), 1.0);
    EXPECT_GE(p * std::ldexp(1.0, -(l - 1)), 1.0);
  }
}

TEST(LevelRule, Validation) {
  EXPECT_THROW(LevelRule::make(0, 3, 1), std::invalid_argument);
  EXPECT_THROW(LevelRule::make(2, 3, -1), std::invalid_argument);
  EXPECT_THROW(LevelRule::make(2, 1, 2), std::invalid_argument);
  EXPECT_EQ(LevelRule::make(2, 2, 2).lambda, 2);
}

TEST(CombinationSet, SmallExample) {
  const CombinationSet set(LevelRule::make(2, 3, 1));
  const auto l0 = set.layer(0), l1 = set.layer(1);
  ASSERT_EQ(l0.size(), 3u);
  ASSERT_EQ(l1.size(), 2u);
  std::set<MultiIndex> a, b;
  for (const auto& e : l0) {
    a.insert(e.level);
    EXPECT_EQ(e.coefficient, 1);
  }
  for (const auto& e : l1) {
    b.insert(e.level);
    EXPECT_EQ(e.coefficient, -1);
  }
  EXPECT_EQ(a, (std::set<MultiIndex>{{1, 3}, {2, 2}, {3, 1}}));
  EXPECT_EQ(b, (std::set<MultiIndex>{{1, 2}, {2, 1}}));
}

TEST(CombinationSet, ThreeDimensionalCoefficients) {
  const CombinationSet set(LevelRule::make(3, 4, 1));
  EXPECT_EQ(set.layer(0).front().coefficient, 1);
  EXPECT_EQ(set.layer(1).front().coefficient, -2);
  EXPECT_EQ(set.layer(2).front().coefficient, 1);
}

TEST(CombinationSet, MatchesEnumerationAndSumsToOne) {
  for (int d = 1; d <= 6; ++d)
    for (int p = 1; p <= 4; ++p) {
      const int lam = lambda_eff(p);
      for (int n = lam; n <= 12; ++n) {
        const CombinationSet set(LevelRule::make(d, n, p));
        EXPECT_EQ(set.coefficient_sum(), 1) << d << " " << n << " " << p;
        if (d > 4) continue;  // enumeration gets slow
        for (int l = 0; l < d; ++l) {
          const int target = n + (d - 1) * lam - l;
          const auto brute = brute_levels(d, lam, target, [&](const MultiIndex& v) { return sum(v) == target; });
          const auto layer = set.layer(l);
          EXPECT_EQ(static_cast<long long>(layer.size()), pascal(n + d - 1 - lam - l, d - 1));
          ASSERT_EQ(layer.size(), brute.size());
          std::set<MultiIndex> got;
          for (const auto& e : layer) {
            got.insert(e.level);
            EXPECT_EQ(e.coefficient, (l % 2 ? -1 : 1) * pascal(d - 1, l));
          }
          EXPECT_EQ(got, std::set<MultiIndex>(brute.begin(), brute.end()));
        }
      }
    }
}

TEST(HierSet, SmallExamples) {
  const HierSet h(LevelRule::make(2, 3, 1));
  EXPECT_EQ(std::set<MultiIndex>(h.levels().begin(), h.levels().end()),
            (std::set<MultiIndex>{{1, 1}, {1, 2}, {2, 1}, {1, 3}, {2, 2}, {3, 1}}));
  EXPECT_TRUE(h.contains({2, 2}));
  EXPECT_FALSE(h.contains({3, 2}));
  const HierSet chain(LevelRule::make(1, 5, 3));
  EXPECT_EQ(chain.levels(), (std::vector<MultiIndex>{{2}, {3}, {4}, {5}}));
  EXPECT_EQ(HierSet(LevelRule::make(3, 4, 1)).size(), 20u);
}

TEST(HierSet, CardinalityMatchesEnumeration) {
  for (int d = 1; d <= 4; ++d)
    for (int p = 1; p <= 4; ++p) {
      const int lam = lambda_eff(p);
      for (int n = lam; n <= 8; ++n) {
        const int cap = n + (d - 1) * lam;
        const auto brute = brute_levels(d, lam, cap, [&](const MultiIndex& v) { return sum(v) <= cap; });
        const HierSet h(LevelRule::make(d, n, p));
        EXPECT_EQ(h.size(), brute.size());
        EXPECT_EQ(static_cast<long long>(h.size()), pascal(n - lam + d, d));
        for (const auto& l : brute) EXPECT_TRUE(h.contains(l));
      }
    }
}

TEST(Binomial, ZeroConventionAndPascal) {
  for (int n = 0; n <= 30; ++n)
    for (int k = 0; k <= n; ++k) EXPECT_EQ(binomial(n, k), BigInt(pascal(n, k)));
  EXPECT_EQ(binomial(3, 5), 0);
  EXPECT_EQ(binomial(-2, 1), 0);
  EXPECT_EQ(binomial(4, -1), 0);
  EXPECT_EQ(binomial(80, 40), BigInt("107507208733336176461620"));
}

TEST(Binomial, PolynomialForm) {
  EXPECT_EQ(binomial_poly(5, 2), 10);
  EXPECT_EQ(binomial_poly(-1, 3), -1);  // (-1)(-2)(-3)/6
  EXPECT_EQ(binomial_poly(-2, 2), 3);   // (-2)(-3)/2
  EXPECT_EQ(binomial_poly(2, 3), 0);
  EXPECT_EQ(binomial_poly(7, 0), 1);
  EXPECT_EQ(binomial_poly(7, -1), 0);
}

TEST(Identities, AlternatingPowerSums) {
  EXPECT_EQ(alternating_power_sum(3, 1), 0);
  EXPECT_EQ(alternating_power_sum(2, 0), 0);
  for (int d = 2; d <= 8; ++d) {
    EXPECT_TRUE(alternating_power_sums_vanish(d));
    // The first non-vanishing power: sum = (-1)^(d-1) (d-1)!
    long long fact = 1;
    for (int i = 2; i <= d - 1; ++i) fact *= i;
    EXPECT_EQ(alternating_power_sum(d, d - 1), BigInt((d % 2 ? 1 : -1) * fact));
  }
}

TEST(Identities, LayeredBinomialSums) {
  EXPECT_EQ(layered_binomial_sum(3, 5, 1, 2, 0), 1);
  EXPECT_EQ(layered_binomial_sum(3, 5, 1, 2, 1), 0);
  for (int d = 1; d <= 6; ++d)
    for (int p = 1; p <= 4; ++p)
      for (int n = lambda_eff(p); n <= 12; ++n)
        for (int ell = 0; ell <= n; ++ell)
          for (int k = 0; k <= d - 1; ++k)
            ASSERT_EQ(layered_binomial_sum(d, n, p, ell, k), k == 0 ? 1 : 0)
                << d << " " << n << " " << p << " " << ell << " " << k;
}

TEST(Dimensions, IncrementSumFormula) {
  EXPECT_EQ(sparse_dimension(LevelRule::make(2, 3, 1)).sparse, 49);
  EXPECT_EQ(sparse_dimension(LevelRule::make(2, 3, 1)).full, 81);
  for (int n = 1; n <= 10; ++n) {
    const auto dc = sparse_dimension(LevelRule::make(1, n, 1));
    EXPECT_EQ(dc.sparse, dc.full);
  }
  // Direct sum over every level box, independent of HierSet.
  for (int d = 1; d <= 3; ++d)
    for (int p = 1; p <= 3; ++p) {
      const int lam = lambda_eff(p);
      for (int n = lam; n <= 7; ++n) {
        const int cap = n + (d - 1) * lam;
        long long total = 0;
        for (const auto& l : brute_levels(d, lam, cap, [&](const MultiIndex& v) { return sum(v) <= cap; })) {
          long long prod = 1;
          for (int v : l) prod *= v == lam ? (1LL << lam) + p : 1LL << (v - 1);
          total += prod;
        }
        EXPECT_EQ(sparse_dimension(LevelRule::make(d, n, p)).sparse, total);
      }
    }
}

TEST(Constants, ClosedForms) {
  EXPECT_NEAR(constants::c1(3, 1), 2.0, 1e-15);
  EXPECT_NEAR(constants::c2(2), 12.0, 1e-14);
  // d = 2 collapses both closed forms by hand
  const double ln2 = std::log(2.0);
  EXPECT_NEAR(constants::c10(2, 2, 0), 1.0 / ln2, 1e-14);
  EXPECT_NEAR(constants::c10(2, 3, 1), 2.0 / ln2, 1e-14);
  // (q+1) (2 sqrt 3)^(2q) * 2 * 2 / (2 ln 2)
  EXPECT_NEAR(constants::c11(2, 1), 2 * 12.0 * 2 / ln2, 1e-11);
  EXPECT_NEAR(constants::c11(2, 2), 3 * 144.0 * 2 / ln2, 1e-10);
}
