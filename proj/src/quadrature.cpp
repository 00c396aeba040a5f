#include "sgspline/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sgspline {

QuadratureRule gauss_rule(int points) {
  if (points < 1 || points > 16) throw std::invalid_argument("gauss_rule: points must be in [1, 16]");
  QuadratureRule rule;
  rule.nodes.resize(points);
  rule.weights.resize(points);
  const int n = points;
  // Newton iteration on P_n from the Chebyshev-like initial guess; symmetric pairs.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map [-1,1] -> (0,1), ascending order.
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = 0.5 * w;
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.5;
  return rule;
}

CompositeRule::CompositeRule(int level, const QuadratureRule& rule)
    : level_(level), points_(rule.points()) {
  if (level < 0 || level > 24) throw std::invalid_argument("CompositeRule: level out of range");
  const int cells = 1 << level;
  const double h = 1.0 / cells;
  nodes_.reserve(static_cast<std::size_t>(cells) * points_);
  weights_.reserve(nodes_.capacity());
  for (int e = 0; e < cells; ++e) {
    for (int k = 0; k < points_; ++k) {
      nodes_.push_back((e + rule.nodes[k]) * h);
      weights_.push_back(rule.weights[k] * h);
    }
  }
}

}  // namespace sgspline
