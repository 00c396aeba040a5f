#pragma once

// Level index sets of the sparse-grid constructions, combination coefficients,
// exact combinatorial identities and dimension counts.

#include "sgspline/multi_index.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <vector>

namespace sgspline {

using BigInt = boost::multiprecision::cpp_int;

/// Smallest admissible level: 1 for p <= 1, otherwise the smallest lambda with 2^lambda > p.
int lambda_eff(int p);

struct LevelRule {
  int d = 1;
  int n = 1;
  int p = 1;
  int lambda = 1;

  /// Rejects d < 1, p < 0 and n < lambda_eff(p).
  static LevelRule make(int d, int n, int p);
};

/// All l >= min_part (componentwise) with |l|_1 = total, in lexicographic order.
std::vector<MultiIndex> compositions(int d, int total, int min_part);

struct CombinationEntry {
  MultiIndex level;
  int coefficient = 0;
  int layer = 0;
};

/// Layers l = 0..d-1 with |level|_1 = n + (d-1) lambda - l and coefficient (-1)^l binom(d-1, l).
class CombinationSet {
 public:
  explicit CombinationSet(const LevelRule& rule);

  const LevelRule& rule() const noexcept { return rule_; }
  const std::vector<CombinationEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::vector<CombinationEntry> layer(int l) const;
  long long coefficient_sum() const;

 private:
  LevelRule rule_;
  std::vector<CombinationEntry> entries_;
};

/// Levels l >= lambda with |l|_1 <= n + (d-1) lambda, ordered by |l|_1 then lexicographically.
class HierSet {
 public:
  explicit HierSet(const LevelRule& rule);

  const LevelRule& rule() const noexcept { return rule_; }
  const std::vector<MultiIndex>& levels() const noexcept { return levels_; }
  std::size_t size() const noexcept { return levels_.size(); }
  bool contains(const MultiIndex& level) const;

 private:
  LevelRule rule_;
  std::vector<MultiIndex> levels_;
};

/// binom(n, k), zero unless 0 <= k <= n.
BigInt binomial(long long n, long long k);
/// x (x-1) ... (x-k+1) / k! for any integer x; zero for k < 0.
BigInt binomial_poly(long long x, long long k);

/// sum_{l=0}^{d-1} (-1)^l binom(d-1, l) l^i
BigInt alternating_power_sum(int d, int i);
/// True iff alternating_power_sum(d, i) == 0 for every 0 <= i <= d-2.
bool alternating_power_sums_vanish(int d);
/// sum_{l=0}^{d-1} (-1)^l binom(d-1, l) binom(n+d-1-lambda-l-ell, d-1-k), evaluated with the
/// polynomial binomial.
BigInt layered_binomial_sum(int d, int n, int p, int ell, int k);

/// Univariate increment dimension: 2^lambda + p at the base level, 2^(level-1) above it.
long long increment_dim(int level, int p, int lambda);

struct DimensionCount {
  BigInt sparse;
  BigInt full;  // (2^n + p)^d
};
DimensionCount sparse_dimension(const LevelRule& rule);

namespace constants {
/// (sqrt 2)^(q-r)
double c1(int q, int r);
/// (2 sqrt 3)^q
double c2(int q);
/// Combination-technique approximation constant, summed directly from its closed form.
double c10(int d, int q, int r);
/// Sparse inverse-inequality constant.
double c11(int d, int q);
}  // namespace constants

}  // namespace sgspline
