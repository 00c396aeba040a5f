#pragma once

// Gram matrices, H^r-seminorm projections (univariate, directional, full tensor)
// and Sobolev / mixed-Sobolev error norms on the parameter domain (0,1)^d.

#include "sgspline/bspline.hpp"
#include "sgspline/kernels.hpp"
#include "sgspline/multi_index.hpp"
#include "sgspline/ndarray.hpp"
#include "sgspline/quadrature.hpp"
#include "sgspline/targets.hpp"

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <span>
#include <vector>

namespace sgspline {

struct GramMatrix {
  int order = 0;
  /// (D^r b_i, D^r b_j)_{L2(0,1)}
  Eigen::MatrixXd matrix;
};

/// Element-by-element assembly; rejects rules with fewer than p+1 points.
GramMatrix gram(const SplineSpace1D& space, int r, const QuadratureRule& rule);
inline GramMatrix gram(const SplineSpace1D& space, int r) {
  return gram(space, r, gauss_rule(space.degree() + 1));
}

/// Derivatives of the active basis functions of a space at a list of nodes.
class BasisTable {
 public:
  BasisTable(const SplineSpace1D& space, std::span<const double> nodes, int max_order);

  const SplineSpace1D& space() const noexcept { return space_; }
  std::size_t num_nodes() const noexcept { return first_.size(); }
  int width() const noexcept { return width_; }
  int max_order() const noexcept { return max_order_; }
  int first(std::size_t node) const { return first_[node]; }
  double value(std::size_t node, int m, int j) const {
    return values_[(node * (max_order_ + 1) + m) * width_ + j];
  }

  /// out[k] = sum_i D^m b_i(x_k) c_i
  void apply(std::span<const double> coeffs, std::span<double> out, int m) const;
  /// out[i] = sum_k D^m b_i(x_k) w_k v_k
  void apply_transpose(std::span<const double> values, std::span<const double> weights,
                       std::span<double> out, int m) const;
  /// Nodes x dim matrix of D^m b_i(x_k).
  Eigen::MatrixXd dense(int m) const;

 private:
  SplineSpace1D space_;
  int width_;
  int max_order_;
  std::vector<int> first_;
  std::vector<double> values_;
};

/// H^r-seminorm-orthogonal projection of sampled data onto one spline space.
/// For r >= 1 the seminorm kernel is fixed by making the residual L2-orthogonal
/// to polynomials of degree < r.
class AxisProjector {
 public:
  AxisProjector(const SplineSpace1D& space, const CompositeRule& grid, int r);

  const SplineSpace1D& space() const noexcept { return table_.space(); }
  const BasisTable& table() const noexcept { return table_; }
  int order() const noexcept { return r_; }

  /// Coefficients from samples of f (and of f^{(r)} when r >= 1) at the grid nodes.
  void solve(std::span<const double> values, std::span<const double> deriv_values,
             std::span<double> coeffs) const;

  /// Length of the load vector: dim, plus r moment constraints when r >= 1.
  int load_size() const noexcept { return space().dim() + r_; }
  /// First block of the load vector, B_r^T W v_r; the moment block is zeroed.
  void stiffness_load(std::span<const double> deriv_values, std::span<double> rhs) const;
  /// Moment block (x^j, v)_W, j < r; the first block is zeroed.
  void moment_load(std::span<const double> values, std::span<double> rhs) const;
  /// Solves the (saddle-point) normal equations for a load vector of length load_size().
  void solve_load(std::span<const double> rhs, std::span<double> coeffs) const;

 private:
  BasisTable table_;
  std::vector<double> weights_;
  int r_;
  Eigen::MatrixXd monomials_;  // nodes x r, x^j
  double constraint_scale_ = 1.0;
  std::optional<Eigen::LLT<Eigen::MatrixXd>> mass_;
  std::optional<Eigen::PartialPivLU<Eigen::MatrixXd>> saddle_;
};

/// Univariate projection pi_{p,h_l} f onto `space` in the H^r seminorm.
std::vector<double> project_1d(const SplineSpace1D& space, const Target& f, int r);
std::vector<double> project_1d(const SplineSpace1D& space, const Target& f, int r,
                               const CompositeRule& grid);

/// Coefficients of a function in S_{p,h_l}(0,1)^d (row-major, last direction fastest).
struct CoefficientTensor {
  int degree = 0;
  MultiIndex level;
  NdArray coefficients;

  CoefficientTensor() = default;
  CoefficientTensor(int degree, MultiIndex level);

  int dim() const noexcept { return static_cast<int>(level.size()); }
  SplineSpace1D space(int axis) const { return SplineSpace1D(degree, level.at(axis)); }
  /// D^alpha u(x); empty alpha means the value.
  double evaluate(std::span<const double> x, std::span<const int> alpha = {}) const;
};

/// D^alpha u at every node of the tensor grid built from `grid` in each direction.
NdArray eval_on_grid(const CoefficientTensor& u, const CompositeRule& grid,
                     std::span<const int> alpha = {}, Execution exec = Execution::Parallel);

enum class AxisKind { Sampled, Coefficients };

/// A d-variate function after projecting a subset of directions: projected
/// directions hold spline coefficients, the others hold samples at the nodes of a
/// shared composite grid. For r >= 1 the samples of D^{r e_i} are carried along so
/// the seminorm projection can still be applied in those directions.
class DirectionalField {
 public:
  static DirectionalField sample(const Target& f, int degree, MultiIndex level, int r,
                                 const CompositeRule& grid);

  int dim() const noexcept { return static_cast<int>(level_.size()); }
  int degree() const noexcept { return degree_; }
  int order() const noexcept { return r_; }
  const MultiIndex& level() const noexcept { return level_; }
  const CompositeRule& grid() const noexcept { return grid_; }
  AxisKind axis_kind(int axis) const { return kinds_.at(axis); }
  bool fully_projected() const;

  /// The same samples viewed against other projection levels; every direction must still
  /// be sampled and the grid must resolve the new levels.
  DirectionalField with_level(MultiIndex level) const;

  /// Apply Pi_{p,h_{l_i}} in each listed (still sampled) direction; order is irrelevant.
  DirectionalField project(std::span<const int> axes) const;
  /// Apply (I - Pi_{p,h_{l_i}}) in each listed sampled direction; the result stays sampled.
  DirectionalField complement(std::span<const int> axes) const;

  /// D^alpha of the represented function on the tensor grid. On sampled axes alpha_i
  /// must be 0 or r.
  NdArray values(std::span<const int> alpha = {}) const;
  CoefficientTensor coefficients() const;

 private:
  DirectionalField(int degree, MultiIndex level, int r, CompositeRule grid);

  int degree_;
  MultiIndex level_;
  int r_;
  CompositeRule grid_;
  std::vector<AxisKind> kinds_;
  // Keyed by derivative order per axis: 0 or r on sampled axes, 0 on coefficient axes.
  std::map<std::vector<int>, NdArray> arrays_;
};

/// Default sampling grid for projecting onto levels up to max(level): p+1 Gauss points.
CompositeRule projection_grid(int degree, const MultiIndex& level);

/// Pi^J_{p,h_l} f. Empty `directions` returns the sampled (unprojected) field.
DirectionalField project_tensor(const MultiIndex& level, int p, const Target& f,
                                std::span<const int> directions, int r = 0);
DirectionalField project_tensor(const MultiIndex& level, int p, const Target& f,
                                std::span<const int> directions, int r,
                                const CompositeRule& grid);

enum class NormKind {
  Seminorm,       // |.|_{H^r}: |alpha|_1 = r
  Norm,           // ||.||_{H^r}: |alpha|_1 <= r
  MixedSeminorm,  // |.|_{H^q_mix}: |alpha|_inf = q
  MixedNorm,      // ||.||_{H^q_mix}: |alpha|_inf <= q
};

/// Derivative multi-indices entering a norm.
std::vector<MultiIndex> norm_multi_indices(int d, NormKind kind, int order);

/// Norm of f - sum_t weights[t] * terms[t] by tensor Gauss quadrature with p+3
/// points per cell of the finest level involved.
double error_norm(const Target& f, std::span<const CoefficientTensor> terms,
                  std::span<const double> weights, NormKind kind, int order,
                  Execution exec = Execution::Parallel);
double error_norm(const Target& f, const CoefficientTensor& u, NormKind kind, int order);

/// Norm of f alone on a composite grid.
double target_norm(const Target& f, NormKind kind, int order, const CompositeRule& grid);

}  // namespace sgspline
