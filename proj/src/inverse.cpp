#include "sgspline/inverse.hpp"

#include "sgspline/error.hpp"
#include "sgspline/quad_project.hpp"
#include "sgspline/sg_spaces.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace sgspline {

double max_pencil_ratio(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() == 0) return 0.0;
  const Eigen::MatrixXd as = 0.5 * (a + a.transpose());
  const Eigen::MatrixXd bs = 0.5 * (b + b.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(as, bs, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("max_pencil_ratio: eigensolver failed");
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double univariate_inverse_ratio(int p, int q, int level) {
  const SplineSpace1D space = make_space(p, level);
  if (q < 0 || q > p) throw std::invalid_argument("univariate_inverse_ratio: need 0 <= q <= p");
  const ConstrainedSubspace1D sub = vanishing_subspace(space, q);
  const Eigen::MatrixXd& v = sub.basis();
  const Eigen::MatrixXd k = gram(space, q).matrix;
  const Eigen::MatrixXd m = gram(space, 0).matrix;
  return max_pencil_ratio(v.transpose() * k * v, v.transpose() * m * v);
}

Eigen::MatrixXd sparse_vanishing_basis(const LevelRule& rule, int q) {
  if (q < 0 || q > rule.p) throw std::invalid_argument("sparse_vanishing_basis: need 0 <= q <= p");
  std::vector<Eigen::MatrixXd> blocks;
  Eigen::Index cols = 0;
  for (const CombinationSet set(rule); const auto& e : set.entries()) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Ones(1, 1);
    for (int l : e.level) {
      const SplineSpace1D s(rule.p, l);
      t = kronecker(t, refinement_chain(s, rule.n) * vanishing_subspace(s, q).basis());
    }
    cols += t.cols();
    blocks.push_back(std::move(t));
  }
  Eigen::MatrixXd all(blocks.front().rows(), cols);
  Eigen::Index c = 0;
  for (const auto& b : blocks) {
    all.middleCols(c, b.cols()) = b;
    c += b.cols();
  }
  return column_space(all).basis;
}

double sparse_inverse_ratio(const LevelRule& rule, int q) {
  const Eigen::MatrixXd z = sparse_vanishing_basis(rule, q);
  const SplineSpace1D space(rule.p, rule.n);
  const Eigen::MatrixXd m1 = gram(space, 0).matrix;
  Eigen::MatrixXd k1 = m1;
  for (int r = 1; r <= q; ++r) k1 += gram(space, r).matrix;
  // The full mixed norm is a tensor product of univariate H^q norms.
  Eigen::MatrixXd k = Eigen::MatrixXd::Ones(1, 1), m = Eigen::MatrixXd::Ones(1, 1);
  for (int i = 0; i < rule.d; ++i) {
    k = kronecker(k, k1);
    m = kronecker(m, m1);
  }
  return max_pencil_ratio(z.transpose() * k * z, z.transpose() * m * z);
}

double mapped_inverse_ratio(const LevelRule& rule, int q, const GeometryMap& map, Execution exec) {
  if (map.dim() != rule.d) throw std::invalid_argument("mapped_inverse_ratio: dimension mismatch");
  const Eigen::MatrixXd z = sparse_vanishing_basis(rule, q);
  const MappedGram g = mapped_gram(map, rule.p, rule.n, exec);
  return max_pencil_ratio(z.transpose() * g.stiffness * z, z.transpose() * g.mass * z);
}

}  // namespace sgspline
