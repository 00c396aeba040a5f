#pragma once

// Tensor-product B-spline geometry maps F: [0,1]^d -> Omega, pullback norms and
// mapped Gram matrices.

#include "sgspline/kernels.hpp"
#include "sgspline/quad_project.hpp"
#include "sgspline/sg_spaces.hpp"

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace sgspline {

class GeometryMap {
 public:
  /// Control points in row-major multi-index order (last index fastest), (2^level + degree)^dims
  /// of them. Throws NumericalError when det J <= 0 somewhere on the 33^d sample grid.
  GeometryMap(int degree, int dims, std::vector<Eigen::VectorXd> control_points, int level = 0);

  int degree() const noexcept { return degree_; }
  int dim() const noexcept { return dims_; }
  int level() const noexcept { return level_; }
  const std::vector<Eigen::VectorXd>& control_points() const noexcept { return points_; }
  /// Smallest sampled Jacobian determinant.
  double min_jacobian_det() const noexcept { return min_det_; }

  Eigen::VectorXd eval_map(std::span<const double> xi) const;
  /// J(i, j) = dF_i / dxi_j
  Eigen::MatrixXd jacobian(std::span<const double> xi) const;
  /// Both at once.
  void eval(std::span<const double> xi, Eigen::VectorXd& x, Eigen::MatrixXd& jac) const;

  /// Newton iteration from the nearest cached lattice sample. Throws ConvergenceError after
  /// 50 iterations and NumericalError on a singular Jacobian.
  Eigen::VectorXd inverse_map(std::span<const double> x) const;

  /// The same map represented on a finer level by knot insertion.
  GeometryMap refined(int level) const;

  static GeometryMap identity(int d, int degree = 1);
  static GeometryMap affine(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int degree = 1);
  /// Quadratic unit square with its centre control point moved by (0.15, 0.15).
  static GeometryMap distorted_square();
  /// "identity", "shear" or "distorted" (two-dimensional).
  static GeometryMap builtin(const std::string& name);
  static std::vector<std::string> builtin_names();

  /// Plain-text format: `degree = p`, `dims = d`, then `control_points` followed by one
  /// point per line. '#' starts a comment.
  static GeometryMap parse(std::istream& in);
  static GeometryMap from_file(const std::string& path);
  void write(std::ostream& out) const;

 private:
  SplineSpace1D space() const { return SplineSpace1D(degree_, level_); }

  int degree_;
  int dims_;
  int level_;
  std::vector<Eigen::VectorXd> points_;
  double min_det_ = 0.0;
  std::vector<Eigen::VectorXd> lattice_xi_;
  std::vector<Eigen::VectorXd> lattice_x_;
};

/// A parameter-domain function pushed forward to the physical domain: u(x) = u_hat(F^{-1}(x)).
class PhysicalFunction {
 public:
  using ParamFn = std::function<double(std::span<const double>)>;
  PhysicalFunction(ParamFn param, const GeometryMap& map) : param_(std::move(param)), map_(map) {}

  double operator()(std::span<const double> x) const;
  double parameter_value(std::span<const double> xi) const { return param_(xi); }

 private:
  ParamFn param_;
  const GeometryMap& map_;
};

/// f_phys o F on the parameter domain (values only).
class PulledBackTarget final : public Target {
 public:
  PulledBackTarget(const Target& physical, const GeometryMap& map) : f_(physical), map_(map) {}

  int dim() const override { return map_.dim(); }
  int max_order() const override { return 0; }
  double derivative(std::span<const double> xi, std::span<const int> alpha) const override;
  std::string name() const override { return f_.name() + "_pullback"; }

 private:
  const Target& f_;
  const GeometryMap& map_;
};

/// Physical-domain norm of f_phys - u o F^{-1} by quadrature on the parameter grid with
/// |det J| weights. kind is Norm or Seminorm, order 0 or 1.
double pullback_error_norm(const Target& f_phys, std::span<const CoefficientTensor> terms,
                           std::span<const double> weights, const GeometryMap& map,
                           NormKind kind, int order, Execution exec = Execution::Parallel);
double pullback_error_norm(const Target& f_phys, const SparseGridFunction& u,
                           const GeometryMap& map, NormKind kind, int order,
                           Execution exec = Execution::Parallel);

struct MappedGram {
  Eigen::MatrixXd mass;       // (b_i o F^{-1}, b_j o F^{-1})_{L2(Omega)}
  Eigen::MatrixXd stiffness;  // (grad, grad)_{L2(Omega)}
};

/// Physical-domain Gram matrices of S_{p,h_level}^d (tensor basis, row-major ordering),
/// assembled row by row so the parallel and serial paths give identical results.
MappedGram mapped_gram(const GeometryMap& map, int p, int level,
                       Execution exec = Execution::Parallel);

}  // namespace sgspline
