#pragma once

// Univariate maximally smooth B-spline spaces on dyadic meshes of [0,1].

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace sgspline {

/// Exact dyadic rational numerator / 2^exponent.
struct Dyadic {
  std::int64_t numerator = 0;
  int exponent = 0;

  double value() const noexcept;
  friend bool operator==(const Dyadic& a, const Dyadic& b) noexcept {
    // Compare after bringing both to the larger exponent.
    if (a.exponent >= b.exponent)
      return a.numerator == (b.numerator << (a.exponent - b.exponent));
    return (a.numerator << (b.exponent - a.exponent)) == b.numerator;
  }
};

/// Clamped knot vector of degree p on the uniform dyadic mesh of level l:
/// 0 and 1 repeated p+1 times, interior knots j/2^l with multiplicity one.
class KnotVector {
 public:
  KnotVector(int degree, int level);

  int degree() const noexcept { return degree_; }
  int level() const noexcept { return level_; }
  std::size_t size() const noexcept { return exact_.size(); }
  std::span<const Dyadic> exact() const noexcept { return exact_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  int degree_;
  int level_;
  std::vector<Dyadic> exact_;
  std::vector<double> values_;
};

/// S_{p,h_l}(0,1): splines of degree p, C^{p-1} at the interior knots of the level-l mesh.
///
/// Basis function i is supported on [t_i, t_{i+p+1}]; on mesh cell e the active
/// functions are e, ..., e+p.
class SplineSpace1D {
 public:
  /// Level 0 (a single element) is accepted here for coarse geometry descriptions;
  /// make_space() enforces level >= 1.
  SplineSpace1D(int degree, int level);

  int degree() const noexcept { return knots_.degree(); }
  int level() const noexcept { return knots_.level(); }
  int dim() const noexcept { return num_elements() + degree(); }
  int num_elements() const noexcept { return 1 << level(); }
  double h() const noexcept { return 1.0 / num_elements(); }
  const KnotVector& knots() const noexcept { return knots_; }

  /// Mesh cell containing x; x = 1 belongs to the last cell.
  int element_of(double x) const noexcept;

  /// Derivatives 0..max_order of the p+1 functions active at x.
  /// out(m, j) holds the m-th derivative of basis function first + j; returns first.
  int eval_active(double x, int max_order, Eigen::MatrixXd& out) const;

  /// m-th derivative of every basis function at x (length dim()).
  std::vector<double> eval_basis(double x, int m) const;

  /// m-th derivative of the spline with the given coefficients.
  double evaluate(std::span<const double> coeffs, double x, int m = 0) const;

  /// Knot averages; cell midpoints for p = 0.
  std::vector<double> greville() const;

  friend bool operator==(const SplineSpace1D& a, const SplineSpace1D& b) noexcept {
    return a.degree() == b.degree() && a.level() == b.level();
  }

 private:
  KnotVector knots_;
};

/// Validated constructor: p >= 0, level >= 1.
SplineSpace1D make_space(int p, int level);

/// Knot-insertion matrix from level l to level l+1 (fine.dim rows, coarse.dim columns).
Eigen::MatrixXd refinement_operator(const SplineSpace1D& coarse, const SplineSpace1D& fine);

/// Product of consecutive refinement operators from coarse.level() up to target_level.
Eigen::MatrixXd refinement_chain(const SplineSpace1D& coarse, int target_level);

/// Splines whose derivatives of order 2l+q (< p) vanish at both endpoints.
class ConstrainedSubspace1D {
 public:
  ConstrainedSubspace1D(SplineSpace1D parent, int order, Eigen::MatrixXd basis,
                        std::vector<int> constraint_orders);

  const SplineSpace1D& parent() const noexcept { return parent_; }
  int order() const noexcept { return order_; }
  int dim() const noexcept { return static_cast<int>(basis_.cols()); }
  /// Columns are parent coefficient vectors spanning the subspace.
  const Eigen::MatrixXd& basis() const noexcept { return basis_; }
  /// Derivative orders constrained at each endpoint.
  const std::vector<int>& constraint_orders() const noexcept { return constraint_orders_; }

 private:
  SplineSpace1D parent_;
  int order_;
  Eigen::MatrixXd basis_;
  std::vector<int> constraint_orders_;
};

ConstrainedSubspace1D vanishing_subspace(const SplineSpace1D& space, int q);

}  // namespace sgspline
