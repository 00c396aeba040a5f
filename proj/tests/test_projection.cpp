#include "sgspline/quad_project.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace sgspline;

namespace {

constexpr double kPi = std::numbers::pi;

// Cox-de Boor on explicit clamped dyadic knots.
double naive_basis(const std::vector<double>& t, int i, int p, double x) {
  if (p == 0) return (t[i] <= x && x < t[i + 1]) ? 1.0 : 0.0;
  double v = 0.0;
  if (t[i + p] > t[i]) v += (x - t[i]) / (t[i + p] - t[i]) * naive_basis(t, i, p - 1, x);
  if (t[i + p + 1] > t[i + 1])
    v += (t[i + p + 1] - x) / (t[i + p + 1] - t[i + 1]) * naive_basis(t, i + 1, p - 1, x);
  return v;
}

std::vector<double> naive_knots(int p, int level) {
  std::vector<double> t(p + 1, 0.0);
  const int m = 1 << level;
  for (int j = 1; j < m; ++j) t.push_back(static_cast<double>(j) / m);
  t.insert(t.end(), p + 1, 1.0);
  return t;
}

// Composite Simpson, 256 panels per mesh cell.
Eigen::MatrixXd simpson_mass(int p, int level) {
  const auto t = naive_knots(p, level);
  const int n = (1 << level) + p;
  const int panels = 256 << level;
  const double h = 1.0 / panels;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b(n);
  for (int k = 0; k < panels; ++k) {
    const double xs[3] = {k * h + 1e-15, (k + 0.5) * h, (k + 1) * h - 1e-15};
    const double ws[3] = {h / 6, 4 * h / 6, h / 6};
    for (int s = 0; s < 3; ++s) {
      for (int i = 0; i < n; ++i) b(i) = naive_basis(t, i, p, xs[s]);
      m += ws[s] * b * b.transpose();
    }
  }
  return m;
}

LambdaTarget spline_target(const SplineSpace1D& space, std::vector<double> c) {
  return LambdaTarget(1, space.degree(), [space, c](std::span<const double> x, std::span<const int> a) {
    return space.evaluate(c, x[0], a[0]);
  });
}

LambdaTarget tensor_target(const CoefficientTensor& u) {
  return LambdaTarget(u.dim(), u.degree, [u](std::span<const double> x, std::span<const int> a) {
    return u.evaluate(x, a);
  });
}

CoefficientTensor random_tensor(int p, MultiIndex level, unsigned seed) {
  CoefficientTensor u(p, std::move(level));
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (std::size_t i = 0; i < u.coefficients.size(); ++i) u.coefficients[i] = dist(gen);
  return u;
}

}  // namespace

TEST(Gram, IndicatorMasses) {
  const auto g = gram(make_space(0, 1), 0);
  EXPECT_TRUE(g.matrix.isApprox(Eigen::Matrix2d(Eigen::Vector2d(0.5, 0.5).asDiagonal()), 1e-15));
}

TEST(Gram, HatStiffness) {
  Eigen::Matrix3d expected;
  expected << 2, -2, 0, -2, 4, -2, 0, -2, 2;
  EXPECT_TRUE(gram(make_space(1, 1), 1).matrix.isApprox(expected, 1e-14));
}

TEST(Gram, MassMatchesSimpsonOracle) {
  for (int p = 0; p <= 3; ++p)
    for (int l = 1; l <= 3; ++l) {
      const Eigen::MatrixXd g = gram(make_space(p, l), 0).matrix;
      EXPECT_LT((g - simpson_mass(p, l)).cwiseAbs().maxCoeff(), 1e-10) << p << " " << l;
    }
}

TEST(Gram, SymmetryDefinitenessAndKernel) {
  for (int p = 1; p <= 4; ++p)
    for (int l = 1; l <= 5; ++l) {
      const auto space = make_space(p, l);
      const Eigen::MatrixXd m = gram(space, 0).matrix;
      EXPECT_LE((m - m.transpose()).norm(), 1e-13 * m.norm());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
      EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
      for (int r = 1; r <= p; ++r) {
        const Eigen::MatrixXd k = gram(space, r).matrix;
        EXPECT_LE((k - k.transpose()).norm(), 1e-13 * k.norm());
        const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(k).eigenvalues();
        int zero = 0;
        for (double v : ev) zero += std::abs(v) < 1e-9 * ev.cwiseAbs().maxCoeff();
        EXPECT_EQ(zero, r) << "p=" << p << " l=" << l << " r=" << r;
      }
    }
}

TEST(Gram, RejectsUnderResolvedRule) {
  EXPECT_THROW(gram(make_space(3, 2), 0, gauss_rule(3)), std::invalid_argument);
  EXPECT_THROW(gram(make_space(2, 2), 3), std::invalid_argument);
}

TEST(Project1D, IdempotentOnSplines) {
  std::mt19937 gen(1);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int p = 0; p <= 4; ++p)
    for (int r = 0; r <= std::min(p, 2); ++r) {
      const auto space = make_space(p, 3);
      std::vector<double> c(space.dim());
      for (double& v : c) v = dist(gen);
      const auto out = project_1d(space, spline_target(space, c), r);
      for (int i = 0; i < space.dim(); ++i) EXPECT_NEAR(out[i], c[i], 1e-12) << p << " " << r;
    }
}

TEST(Project1D, ConstantGivesOnes) {
  const LambdaTarget one(1, 8, [](auto, std::span<const int> a) { return a[0] == 0 ? 1.0 : 0.0; });
  for (int p = 0; p <= 4; ++p)
    for (double c : project_1d(make_space(p, 2), one, 0)) EXPECT_NEAR(c, 1.0, 1e-13);
}

TEST(Project1D, L2ErrorWithinBestApproximationBound) {
  const auto f = make_builtin_target("sin2pi", 1);
  CoefficientTensor u(2, {4});
  const auto c = project_1d(u.space(0), *f, 0);
  std::copy(c.begin(), c.end(), u.coefficients.data().begin());
  const double err = error_norm(*f, u, NormKind::Norm, 0);
  EXPECT_LE(err, std::pow(std::sqrt(2.0) / 16, 3) * std::pow(2 * kPi, 3) / std::sqrt(2.0));
  EXPECT_GT(err, 0.0);
}

TEST(Project1D, SeminormProjectionOrthogonality) {
  const auto f = make_builtin_target("sin2pi", 1);
  const auto space = make_space(3, 3);
  // Project with the same fine rule the check integrates with; the default rule would leave
  // its own quadrature error in the residual.
  const CompositeRule fine(7, 8);
  const auto c = project_1d(space, *f, 1, fine);
  const int n = space.dim();
  std::vector<double> dres(n, 0.0);
  double mean = 0.0;
  const int one[1] = {1}, zero[1] = {0};
  for (std::size_t k = 0; k < fine.size(); ++k) {
    const double x = fine.nodes()[k], w = fine.weights()[k];
    const double xs[1] = {x};
    const double d = f->derivative(xs, one) - space.evaluate(c, x, 1);
    const auto b1 = space.eval_basis(x, 1);
    for (int i = 0; i < n; ++i) dres[i] += w * d * b1[i];
    mean += w * (f->derivative(xs, zero) - space.evaluate(c, x, 0));
  }
  for (double v : dres) EXPECT_NEAR(v, 0.0, 1e-12);
  EXPECT_NEAR(mean, 0.0, 1e-12);
}

TEST(ProjectTensor, ConstantGivesOnes) {
  const LambdaTarget one(2, 8, [](auto, std::span<const int> a) {
    return a[0] == 0 && a[1] == 0 ? 1.0 : 0.0;
  });
  const auto u = project_tensor({2, 3}, 2, one, std::vector<int>{0, 1}).coefficients();
  for (std::size_t i = 0; i < u.coefficients.size(); ++i) EXPECT_NEAR(u.coefficients[i], 1.0, 1e-13);
}

TEST(ProjectTensor, SeparableEqualsOuterProduct) {
  // Degree p+1 factors keep every quadrature involved exact, so the two routes agree to round-off.
  const int p = 2;
  const SeparableTarget f({Factor1D::polynomial({0.3, -1.0, 2.0, 0.7}), Factor1D::polynomial({1.0, 0.5, 0.0, -1.2})});
  const SeparableTarget gx({Factor1D::polynomial({0.3, -1.0, 2.0, 0.7})});
  const SeparableTarget hy({Factor1D::polynomial({1.0, 0.5, 0.0, -1.2})});
  const auto cx = project_1d(make_space(p, 2), gx, 0);
  const auto cy = project_1d(make_space(p, 3), hy, 0);
  const auto u = project_tensor({2, 3}, p, f, std::vector<int>{0, 1}).coefficients();
  ASSERT_EQ(u.coefficients.extent(0), cx.size());
  ASSERT_EQ(u.coefficients.extent(1), cy.size());
  for (std::size_t i = 0; i < cx.size(); ++i)
    for (std::size_t j = 0; j < cy.size(); ++j)
      EXPECT_NEAR(u.coefficients[i * cy.size() + j], cx[i] * cy[j], 1e-12);
}

TEST(ProjectTensor, PartialProjectionOfSeparableMember) {
  // g in the x-space: projecting in x only leaves g (x) samples of h.
  const auto space = make_space(2, 2);
  const std::vector<double> gc{0.2, -0.4, 1.0, 0.3, -0.8, 0.5};
  const LambdaTarget f(2, 2, [space, gc](std::span<const double> x, std::span<const int> a) {
    return space.evaluate(gc, x[0], a[0]) * std::exp(x[1]);  // every derivative of e^y is e^y
  });
  const auto field = project_tensor({2, 2}, 2, f, std::vector<int>{0});
  EXPECT_EQ(field.axis_kind(0), AxisKind::Coefficients);
  EXPECT_EQ(field.axis_kind(1), AxisKind::Sampled);
  const NdArray v = field.values();
  const auto ys = field.grid().nodes();
  const auto xs = field.grid().nodes();
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < ys.size(); ++j)
      EXPECT_NEAR(v[i * ys.size() + j], space.evaluate(gc, xs[i]) * std::exp(ys[j]), 1e-12);
}

TEST(ProjectTensor, DirectionsCommute) {
  const auto f = make_builtin_target("sinpi_exp", 2);
  const CompositeRule grid = projection_grid(2, {3, 2});
  const auto field = DirectionalField::sample(*f, 2, {3, 2}, 0, grid);
  const int x[1] = {0}, y[1] = {1};
  const auto a = field.project(x).project(y).coefficients();
  const auto b = field.project(y).project(x).coefficients();
  for (std::size_t i = 0; i < a.coefficients.size(); ++i)
    EXPECT_NEAR(a.coefficients[i], b.coefficients[i], 1e-12);
}

TEST(ProjectTensor, IdempotentOnTensorSplines) {
  for (int p = 1; p <= 3; ++p)
    for (int r = 0; r <= 1; ++r) {
      const auto u = random_tensor(p, {2, 3}, 10 + p);
      const auto w = project_tensor({2, 3}, p, tensor_target(u), std::vector<int>{0, 1}, r).coefficients();
      for (std::size_t i = 0; i < u.coefficients.size(); ++i)
        EXPECT_NEAR(w.coefficients[i], u.coefficients[i], 1e-12) << p << " " << r;
    }
}

TEST(ProjectTensor, ComplementPlusProjectionIsIdentity) {
  const auto f = make_builtin_target("sinpi_exp", 2);
  const auto field = DirectionalField::sample(*f, 2, {2, 3}, 0, projection_grid(2, {2, 3}));
  const int x[1] = {0};
  NdArray sum = field.project(x).values();
  sum += field.complement(x).values();
  const NdArray orig = field.values();
  for (std::size_t i = 0; i < sum.size(); ++i) EXPECT_NEAR(sum[i], orig[i], 1e-13);
}

TEST(EvalOnGrid, MatchesPointEvaluation) {
  const auto u = random_tensor(2, {2, 3}, 4);
  const CompositeRule grid(2, 3);
  for (int a0 = 0; a0 <= 2; ++a0) {
    const int alpha[2] = {a0, 1};
    const NdArray v = eval_on_grid(u, grid, alpha);
    const auto nodes = grid.nodes();
    for (std::size_t i = 0; i < nodes.size(); i += 3)
      for (std::size_t j = 0; j < nodes.size(); j += 5) {
        const double x[2] = {nodes[i], nodes[j]};
        EXPECT_NEAR(v[i * nodes.size() + j], u.evaluate(x, alpha), 1e-10);
      }
  }
  const int bad[2] = {3, 0};
  EXPECT_THROW(eval_on_grid(u, grid, bad), std::invalid_argument);
}

TEST(NormMultiIndices, Counts) {
  EXPECT_EQ(norm_multi_indices(2, NormKind::Seminorm, 2).size(), 3u);
  EXPECT_EQ(norm_multi_indices(2, NormKind::Norm, 1).size(), 3u);
  EXPECT_EQ(norm_multi_indices(2, NormKind::Norm, 2).size(), 6u);
  EXPECT_EQ(norm_multi_indices(2, NormKind::MixedSeminorm, 1).size(), 3u);
  EXPECT_EQ(norm_multi_indices(2, NormKind::MixedNorm, 2).size(), 9u);
  EXPECT_EQ(norm_multi_indices(3, NormKind::MixedNorm, 1).size(), 8u);
}

TEST(ErrorNorm, ZeroFunctionAndZeroSpline) {
  const LambdaTarget zero(2, 4, [](auto, auto) { return 0.0; });
  const CoefficientTensor u(2, {2, 2});
  EXPECT_EQ(error_norm(zero, u, NormKind::MixedNorm, 2), 0.0);
}

TEST(ErrorNorm, AnalyticNormsOfSine) {
  const auto f = make_builtin_target("sin2pi", 1);
  const CoefficientTensor u(2, {3});
  EXPECT_NEAR(error_norm(*f, u, NormKind::Norm, 0), std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(error_norm(*f, u, NormKind::Seminorm, 1), 2 * kPi * std::sqrt(0.5), 1e-11);
}

TEST(ErrorNorm, SeparableMixedNormIsProduct) {
  const auto f = make_builtin_target("sinpi_exp", 2);
  const CoefficientTensor u(3, {3, 3});
  const double e2 = std::exp(2.0);
  const double gx0 = 0.5, gx1 = kPi * kPi / 2, hy0 = (e2 - 1) / 2, hy1 = (e2 - 1) / 2;
  const double mixed = std::sqrt((gx0 + gx1) * (hy0 + hy1));
  EXPECT_NEAR(error_norm(*f, u, NormKind::MixedNorm, 1), mixed, 1e-10);
  EXPECT_NEAR(error_norm(*f, u, NormKind::MixedSeminorm, 1),
              std::sqrt((gx0 + gx1) * (hy0 + hy1) - gx0 * hy0), 1e-10);
}

TEST(ErrorNorm, NormOrdering) {
  const auto f = make_builtin_target("sinpi_exp", 2);
  const CoefficientTensor u(2, {3, 3});
  const double h1 = error_norm(*f, u, NormKind::Norm, 1);
  const double mix = error_norm(*f, u, NormKind::MixedNorm, 1);
  const double h2 = error_norm(*f, u, NormKind::Norm, 2);
  EXPECT_LE(h1, mix);
  EXPECT_LE(mix, h2);
}

TEST(ErrorNorm, SplineReproducedExactly) {
  const auto u = random_tensor(2, {2, 2}, 9);
  EXPECT_LT(error_norm(tensor_target(u), u, NormKind::Norm, 2), 1e-12);
}

TEST(ErrorNorm, RejectsOrderAboveDegree) {
  const auto f = make_builtin_target("sinpi", 2);
  const CoefficientTensor u(1, {2, 2});
  EXPECT_THROW(error_norm(*f, u, NormKind::Seminorm, 2), std::invalid_argument);
}
