#include "sgspline/sparse_index.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sgspline {

int lambda_eff(int p) {
  if (p < 0) throw std::invalid_argument("lambda_eff: negative degree");
  if (p <= 1) return 1;
  int lambda = 1;
  while ((1LL << lambda) <= p) ++lambda;
  return lambda;
}

LevelRule LevelRule::make(int d, int n, int p) {
  if (d < 1) throw std::invalid_argument("LevelRule: dimension must be >= 1");
  if (p < 0) throw std::invalid_argument("LevelRule: negative degree");
  const int lambda = lambda_eff(p);
  if (n < lambda)
    throw std::invalid_argument("LevelRule: n = " + std::to_string(n) + " below minimum level " +
                                std::to_string(lambda) + " for p = " + std::to_string(p));
  if (n > 30) throw std::invalid_argument("LevelRule: n too large");
  return LevelRule{d, n, p, lambda};
}

std::vector<MultiIndex> compositions(int d, int total, int min_part) {
  std::vector<MultiIndex> out;
  if (d < 1) return out;
  MultiIndex cur(d, min_part);
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == d - 1) {
      if (remaining >= min_part) {
        cur[pos] = remaining;
        out.push_back(cur);
      }
      return;
    }
    const int tail = (d - 1 - pos) * min_part;
    for (int v = min_part; v <= remaining - tail; ++v) {
      cur[pos] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  rec(rec, 0, total);
  return out;
}

CombinationSet::CombinationSet(const LevelRule& rule) : rule_(rule) {
  const int d = rule.d;
  for (int l = 0; l <= d - 1; ++l) {
    const int c = static_cast<int>(binomial(d - 1, l)) * (l % 2 ? -1 : 1);
    for (auto& lev : compositions(d, rule.n + (d - 1) * rule.lambda - l, rule.lambda))
      entries_.push_back({std::move(lev), c, l});
  }
}

std::vector<CombinationEntry> CombinationSet::layer(int l) const {
  std::vector<CombinationEntry> out;
  for (const auto& e : entries_)
    if (e.layer == l) out.push_back(e);
  return out;
}

long long CombinationSet::coefficient_sum() const {
  long long s = 0;
  for (const auto& e : entries_) s += e.coefficient;
  return s;
}

HierSet::HierSet(const LevelRule& rule) : rule_(rule) {
  const int top = rule.n + (rule.d - 1) * rule.lambda;
  for (int t = rule.d * rule.lambda; t <= top; ++t)
    for (auto& lev : compositions(rule.d, t, rule.lambda)) levels_.push_back(std::move(lev));
}

bool HierSet::contains(const MultiIndex& level) const {
  if (static_cast<int>(level.size()) != rule_.d) return false;
  for (int v : level)
    if (v < rule_.lambda) return false;
  return l1_norm(level) <= rule_.n + (rule_.d - 1) * rule_.lambda;
}

BigInt binomial(long long n, long long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  return binomial_poly(n, k);
}

BigInt binomial_poly(long long x, long long k) {
  if (k < 0) return 0;
  BigInt num = 1, den = 1;
  for (long long i = 0; i < k; ++i) {
    num *= BigInt(x - i);
    den *= BigInt(i + 1);
  }
  return num / den;
}

BigInt alternating_power_sum(int d, int i) {
  BigInt s = 0;
  for (int l = 0; l <= d - 1; ++l) {
    BigInt term = binomial(d - 1, l) * boost::multiprecision::pow(BigInt(l), static_cast<unsigned>(i));
    s += (l % 2) ? BigInt(-term) : term;
  }
  return s;
}

bool alternating_power_sums_vanish(int d) {
  if (d < 2) throw std::invalid_argument("alternating_power_sums_vanish: need d >= 2");
  for (int i = 0; i <= d - 2; ++i)
    if (alternating_power_sum(d, i) != 0) return false;
  return true;
}

BigInt layered_binomial_sum(int d, int n, int p, int ell, int k) {
  const int lambda = lambda_eff(p);
  BigInt s = 0;
  for (int l = 0; l <= d - 1; ++l) {
    BigInt term = binomial(d - 1, l) * binomial_poly(n + d - 1 - lambda - l - ell, d - 1 - k);
    s += (l % 2) ? BigInt(-term) : term;
  }
  return s;
}

long long increment_dim(int level, int p, int lambda) {
  if (level < lambda) throw std::invalid_argument("increment_dim: level below base level");
  if (level == lambda) return (1LL << lambda) + p;
  return 1LL << (level - 1);
}

DimensionCount sparse_dimension(const LevelRule& rule) {
  DimensionCount out;
  for (const HierSet hs(rule); const auto& lev : hs.levels()) {
    BigInt prod = 1;
    for (int v : lev) prod *= increment_dim(v, rule.p, rule.lambda);
    out.sparse += prod;
  }
  out.full = boost::multiprecision::pow(BigInt((1LL << rule.n) + rule.p),
                                        static_cast<unsigned>(rule.d));
  return out;
}

namespace constants {

double c1(int q, int r) { return std::pow(std::sqrt(2.0), q - r); }

double c2(int q) { return std::pow(2.0 * std::sqrt(3.0), q); }

double c10(int d, int q, int r) {
  if (d < 2) throw std::invalid_argument("c10: need d >= 2");
  const double ln2 = std::log(2.0);
  double fact = 1.0;
  for (int i = 2; i <= d - 1; ++i) fact *= i;
  const double lead = std::pow(d - 1.0, d - 1) / (fact * std::pow(ln2, d - 1));
  double sum = 0.0;
  for (int l = 0; l <= d - 2; ++l) {
    const double b = static_cast<double>(binomial(d - 1, l));
    sum += std::pow(2.0, -(q - r) * (d - 1 - l)) * (l % 2 ? -1.0 : 1.0) * b *
           std::pow(r + 1.0, d / 2.0) * std::pow(std::sqrt(2.0), d * (q - r));
  }
  return lead * sum;
}

double c11(int d, int q) {
  if (d < 1) throw std::invalid_argument("c11: need d >= 1");
  double fact = 1.0;
  for (int i = 2; i <= d; ++i) fact *= i;
  return std::pow(q + 1.0, d / 2.0) * std::pow(2.0 * std::sqrt(3.0), d * q) *
         std::pow(2.0, d - 1) * std::pow(2.0, d / 2.0) / (fact * std::pow(std::log(2.0), d / 2.0));
}

}  // namespace constants

}  // namespace sgspline
