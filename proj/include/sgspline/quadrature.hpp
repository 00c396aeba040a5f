#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sgspline {

/// Gauss-Legendre rule on the reference cell (0,1).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  int points() const noexcept { return static_cast<int>(nodes.size()); }
};

/// Gauss-Legendre rule with 1 <= points <= 16, exact for polynomials of degree 2*points-1.
QuadratureRule gauss_rule(int points);

/// A reference rule copied onto every cell of the dyadic mesh of a given level.
class CompositeRule {
 public:
  CompositeRule(int level, const QuadratureRule& rule);
  CompositeRule(int level, int points) : CompositeRule(level, gauss_rule(points)) {}

  int level() const noexcept { return level_; }
  int points_per_element() const noexcept { return points_; }
  int num_elements() const noexcept { return 1 << level_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }

 private:
  int level_;
  int points_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

}  // namespace sgspline
