#include "sgspline/error.hpp"
#include "sgspline/geometry.hpp"
#include "sgspline/sg_spaces.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace sgspline;

namespace {

std::vector<double> random_point(std::mt19937& gen, int d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(d);
  for (double& v : x) v = u(gen);
  return x;
}

Eigen::Matrix2d shear() {
  Eigen::Matrix2d a;
  a << 1.0, 0.4, 0.0, 1.0;
  return a;
}

}  // namespace

TEST(GeometryMap, IdentityIsExact) {
  std::mt19937 gen(1);
  for (int deg = 1; deg <= 3; ++deg) {
    const auto g = GeometryMap::identity(2, deg);
    for (int s = 0; s < 50; ++s) {
      const auto xi = random_point(gen, 2);
      EXPECT_LT((g.eval_map(xi) - Eigen::Vector2d(xi[0], xi[1])).norm(), 1e-12);
      EXPECT_LT((g.jacobian(xi) - Eigen::Matrix2d::Identity()).norm(), 1e-12);
    }
  }
}

TEST(GeometryMap, AffineJacobianIsConstant) {
  std::mt19937 gen(2);
  const Eigen::Vector2d b(0.3, -1.0);
  const auto g = GeometryMap::affine(shear(), b, 2);
  for (int s = 0; s < 50; ++s) {
    const auto xi = random_point(gen, 2);
    const Eigen::Vector2d e(xi[0], xi[1]);
    EXPECT_LT((g.eval_map(xi) - (shear() * e + b)).norm(), 1e-12);
    EXPECT_LT((g.jacobian(xi) - shear()).norm(), 1e-12);
  }
}

TEST(GeometryMap, CornersInterpolateControlPoints) {
  const auto g = GeometryMap::distorted_square();
  const auto& cp = g.control_points();
  const double c00[2] = {0, 0}, c11[2] = {1, 1};
  EXPECT_LT((g.eval_map(c00) - cp.front()).norm(), 1e-15);
  EXPECT_LT((g.eval_map(c11) - cp.back()).norm(), 1e-15);
  EXPECT_GT(g.min_jacobian_det(), 0.0);
}

TEST(GeometryMap, JacobianMatchesFiniteDifferences) {
  std::mt19937 gen(3);
  const auto g = GeometryMap::distorted_square();
  const double e = 1e-6;
  for (int s = 0; s < 30; ++s) {
    auto xi = random_point(gen, 2);
    for (double& v : xi) v = 0.01 + 0.98 * v;
    const Eigen::MatrixXd j = g.jacobian(xi);
    for (int c = 0; c < 2; ++c) {
      auto a = xi, b = xi;
      a[c] += e;
      b[c] -= e;
      const Eigen::VectorXd fd = (g.eval_map(a) - g.eval_map(b)) / (2 * e);
      EXPECT_LT((fd - j.col(c)).norm(), 1e-6 * j.norm());
    }
  }
}

TEST(GeometryMap, NewtonRoundTrip) {
  std::mt19937 gen(4);
  const auto g = GeometryMap::distorted_square();
  for (int s = 0; s < 200; ++s) {
    const auto xi = random_point(gen, 2);
    const Eigen::VectorXd x = g.eval_map(xi);
    const Eigen::VectorXd back = g.inverse_map({x.data(), 2});
    EXPECT_LT((back - Eigen::Vector2d(xi[0], xi[1])).norm(), 1e-10);
    EXPECT_LT((g.eval_map({back.data(), 2}) - x).norm(), 1e-12);
  }
}

TEST(GeometryMap, AffineInverse) {
  const Eigen::Vector2d b(0.5, 0.25);
  const auto g = GeometryMap::affine(shear(), b);
  const Eigen::Vector2d x(1.0, 0.7);
  const Eigen::VectorXd xi = g.inverse_map({x.data(), 2});
  EXPECT_LT((xi - shear().inverse() * (x - b)).norm(), 1e-12);
}

TEST(GeometryMap, InverseOutsideDomainFails) {
  const auto g = GeometryMap::identity(2);
  const double far[2] = {3.0, 3.0};
  EXPECT_THROW(g.inverse_map(far), ConvergenceError);
}

TEST(GeometryMap, RefinementKeepsTheMap) {
  std::mt19937 gen(5);
  const auto g = GeometryMap::distorted_square();
  for (int level : {1, 3}) {
    const auto r = g.refined(level);
    EXPECT_EQ(r.level(), level);
    for (int s = 0; s < 500; ++s) {
      const auto xi = random_point(gen, 2);
      EXPECT_LT((r.eval_map(xi) - g.eval_map(xi)).norm(), 1e-12);
    }
  }
}

TEST(GeometryMap, FoldedMapRejected) {
  std::vector<Eigen::VectorXd> cp{Eigen::Vector2d(0, 0), Eigen::Vector2d(0, 1), Eigen::Vector2d(1, 0),
                                  Eigen::Vector2d(-1, -1)};
  EXPECT_THROW(GeometryMap(1, 2, cp), NumericalError);
  EXPECT_THROW(GeometryMap(1, 2, {cp.begin(), cp.begin() + 3}), std::invalid_argument);
}

TEST(GeometryMap, ParseAndWriteRoundTrip) {
  const auto g = GeometryMap::distorted_square();
  std::stringstream s;
  g.write(s);
  const auto h = GeometryMap::parse(s);
  EXPECT_EQ(h.degree(), 2);
  EXPECT_EQ(h.dim(), 2);
  ASSERT_EQ(h.control_points().size(), g.control_points().size());
  for (std::size_t i = 0; i < g.control_points().size(); ++i)
    EXPECT_EQ(h.control_points()[i], g.control_points()[i]);
}

TEST(GeometryMap, ParseErrors) {
  std::istringstream missing("degree = 1\ncontrol_points\n0 0\n");
  EXPECT_THROW(GeometryMap::parse(missing), std::invalid_argument);
  std::istringstream bad("degree = 1\ndims = 2\ncontrol_points\n0 0\n0 1\n1 0\n1 x\n");
  EXPECT_THROW(GeometryMap::parse(bad), std::invalid_argument);
  std::istringstream ok("# unit square\ndegree = 1\ndims = 2\ncontrol_points\n0 0\n0 1\n1 0\n1 1\n");
  EXPECT_NO_THROW(GeometryMap::parse(ok));
  EXPECT_THROW(GeometryMap::from_file("/nonexistent/geometry.txt"), std::runtime_error);
  EXPECT_THROW(GeometryMap::builtin("circle"), std::invalid_argument);
}

TEST(PhysicalFunction, ComposesWithInverse) {
  const auto g = GeometryMap::distorted_square();
  const PhysicalFunction u([](std::span<const double> xi) { return xi[0] + 2 * xi[1] * xi[1]; }, g);
  const double xi[2] = {0.3, 0.8};
  const Eigen::VectorXd x = g.eval_map(xi);
  EXPECT_NEAR(u({x.data(), 2}), 0.3 + 2 * 0.64, 1e-10);
}

TEST(PullbackNorm, IdentityEqualsParameterNorm) {
  const auto f = make_builtin_target("sinpi_exp", 2);
  const auto u = combination_project(*f, LevelRule::make(2, 4, 2));
  const auto id = GeometryMap::identity(2);
  EXPECT_NEAR(pullback_error_norm(*f, u, id, NormKind::Norm, 0), error_norm(*f, u, NormKind::Norm, 0), 1e-12);
  EXPECT_NEAR(pullback_error_norm(*f, u, id, NormKind::Seminorm, 1), error_norm(*f, u, NormKind::Seminorm, 1),
              1e-11);
}

TEST(PullbackNorm, AffineScalesBySqrtDet) {
  const Eigen::Matrix2d a = 1.7 * shear();
  const Eigen::Vector2d b(0.2, 0.1);
  const auto g = GeometryMap::affine(a, b);
  // f_phys(x) = sinpi_exp(A^{-1}(x - b)); its pullback is sinpi_exp itself.
  const auto base = make_builtin_target("sinpi_exp", 2);
  const Eigen::Matrix2d ainv = a.inverse();
  const LambdaTarget phys(2, 0, [&](std::span<const double> x, std::span<const int> alpha) {
    const Eigen::Vector2d xi = ainv * (Eigen::Vector2d(x[0], x[1]) - b);
    const double p[2] = {xi(0), xi(1)};
    return base->derivative(p, alpha);
  });
  const auto u = combination_project(*base, LevelRule::make(2, 4, 1));
  EXPECT_NEAR(pullback_error_norm(phys, u, g, NormKind::Norm, 0),
              std::sqrt(std::abs(a.determinant())) * error_norm(*base, u, NormKind::Norm, 0), 1e-10);
}

TEST(PullbackNorm, PushForwardHasZeroError) {
  const auto g = GeometryMap::distorted_square();
  CoefficientTensor u(2, {2, 2});
  std::mt19937 gen(6);
  for (double& v : u.coefficients.data()) v = std::uniform_real_distribution<double>(-1, 1)(gen);
  const LambdaTarget phys(2, 0, [&](std::span<const double> x, std::span<const int>) {
    const Eigen::VectorXd xi = g.inverse_map(x);
    return u.evaluate({xi.data(), 2});
  });
  const std::vector<CoefficientTensor> terms{u};
  const std::vector<double> w{1.0};
  EXPECT_LT(pullback_error_norm(phys, terms, w, g, NormKind::Norm, 0), 1e-11);
  EXPECT_THROW(pullback_error_norm(phys, terms, w, g, NormKind::Norm, 2), std::invalid_argument);
}

TEST(MappedGram, IdentityMatchesTensorGrams) {
  const auto g = GeometryMap::identity(2);
  const SplineSpace1D s(2, 2);
  const Eigen::MatrixXd m1 = gram(s, 0).matrix, k1 = gram(s, 1).matrix;
  const auto mg = mapped_gram(g, 2, 2);
  EXPECT_LT((mg.mass - kronecker(m1, m1)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((mg.stiffness - (kronecker(k1, m1) + kronecker(m1, k1))).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(MappedGram, MassSumsToArea) {
  // Partition of unity: 1^T M 1 = |Omega|.
  const Eigen::Matrix2d a = shear() * 1.5;
  const auto mg = mapped_gram(GeometryMap::affine(a, Eigen::Vector2d::Zero()), 1, 2);
  EXPECT_NEAR(mg.mass.sum(), a.determinant(), 1e-12);
  EXPECT_NEAR(mg.stiffness.sum(), 0.0, 1e-10);
}
