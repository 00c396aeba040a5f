#pragma once

// Sparse-grid spline spaces: the combination technique and hierarchical
// increments, plus the checks that relate the two constructions.

#include "sgspline/quad_project.hpp"
#include "sgspline/sparse_index.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

namespace sgspline {

/// sum_l c_l u_l over the levels of a combination set.
struct SparseGridFunction {
  CombinationSet set;
  std::vector<CoefficientTensor> terms;  // aligned with set.entries()

  int dim() const noexcept { return set.rule().d; }
  int degree() const noexcept { return set.rule().p; }
  std::vector<double> weights() const;
  double evaluate(std::span<const double> x, std::span<const int> alpha = {}) const;
  NdArray eval_on_grid(const CompositeRule& grid, std::span<const int> alpha = {},
                       Execution exec = Execution::Parallel) const;
};

/// Pi^L f = sum_l c_l Pi_{p,h_l} f. All levels share one sampling grid at level n.
SparseGridFunction combination_project(const Target& f, const LevelRule& rule, int r = 0);

double error_norm(const Target& f, const SparseGridFunction& u, NormKind kind, int order,
                  Execution exec = Execution::Parallel);

/// Fine-level basis indices spanning the increment at `level` (all of S_{p,h_level} at the
/// base level).
std::vector<int> increment_indices(int level, int p, int lambda);

struct HierIncrementBasis {
  MultiIndex level;
  std::vector<std::vector<int>> selected;  // per direction, indices into S_{p,h_{level_i}}
  std::size_t size() const;
};

/// Increment bases for every level of the hierarchical set. Throws NumericalError if a
/// univariate chain of increments fails the direct-sum rank check.
std::vector<HierIncrementBasis> hier_basis(const LevelRule& rule);

struct HierFunction {
  HierSet set;
  std::vector<HierIncrementBasis> bases;  // aligned with set.levels()
  std::vector<NdArray> coefficients;      // extents = selected sizes

  double evaluate(std::span<const double> x) const;
};

/// Hierarchical coefficients of a combination-form function, by least squares on the
/// collocation grid.
HierFunction to_hierarchical(const SparseGridFunction& u);

/// Greville abscissae of S_{p,h_level}; cell midpoints for p = 0.
std::vector<double> collocation_points(int p, int level);

/// Rows: tensor grid points (last direction fastest). Columns: tensor basis functions of the
/// given per-direction selections of S_{p,h_level}.
Eigen::MatrixXd tensor_collocation(int p, const MultiIndex& level,
                                   const std::vector<std::vector<int>>& selected,
                                   const std::vector<std::vector<double>>& points);

/// Kronecker product; the row-major tensor ordering used throughout.
Eigen::MatrixXd kronecker(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

struct ColumnSpace {
  int rank = 0;
  Eigen::MatrixXd basis;  // orthonormal, rank columns
};
/// Numerical rank (singular values above rel_tol * largest) and an orthonormal basis.
ColumnSpace column_space(const Eigen::MatrixXd& a, double rel_tol = 1e-8);

struct EquivalenceReport {
  int dim_combination = 0;    // collocation rank of all combination-level bases
  int dim_hierarchical = 0;   // number of increment functions
  int rank_hierarchical = 0;  // collocation rank of the increment functions
  long long dim_formula = 0;  // sparse_dimension
  double cross_residual_max = 0.0;
};
EquivalenceReport equivalence_report(const LevelRule& rule);

/// Max |(I - Pi_l) f - sum_{J != {}} (-1)^{|J|-1} (I - Pi)^J f| on a quadrature grid, over
/// the value and, for r >= 1, the carried derivative patterns.
double telescopic_residual(const Target& f, int p, const MultiIndex& level, int r = 0);

/// a_{J,l}: J as a bit mask over directions, l restricted to J (other entries ignored).
using AbstractValues = std::function<double(std::uint32_t, const MultiIndex&)>;
/// Deterministic pseudo-random values in [-1,1] that depend only on (seed, J, l_J).
AbstractValues random_abstract_values(std::uint64_t seed);

struct CancellationResidual {
  double lhs = 0.0;
  double rhs = 0.0;
  double scale = 0.0;  // sum of |terms| on the left
  double relative() const;
};
/// Both sides of the coarse-contribution cancellation identity of the combination technique.
CancellationResidual cancellation_residual(const LevelRule& rule, const AbstractValues& a);

}  // namespace sgspline
