#include "sgspline/targets.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sgspline {

double Target::value(std::span<const double> x) const {
  std::vector<int> zero(static_cast<std::size_t>(dim()), 0);
  return derivative(x, zero);
}

Factor1D Factor1D::sine(double a, double b) {
  Factor1D f;
  f.kind_ = Kind::Sine;
  f.a_ = a;
  f.b_ = b;
  return f;
}

Factor1D Factor1D::exponential(double a) {
  Factor1D f;
  f.kind_ = Kind::Exp;
  f.a_ = a;
  return f;
}

Factor1D Factor1D::polynomial(std::vector<double> coeffs) {
  Factor1D f;
  f.kind_ = Kind::Poly;
  f.poly_ = std::move(coeffs);
  return f;
}

Factor1D Factor1D::bump(int a, double scale) {
  // Expand x^a (1-x)^a = sum_j (-1)^j C(a,j) x^{a+j}.
  std::vector<double> c(static_cast<std::size_t>(2 * a + 1), 0.0);
  double binom = 1.0;
  for (int j = 0; j <= a; ++j) {
    c[a + j] = scale * ((j % 2) ? -binom : binom);
    binom = binom * (a - j) / (j + 1);
  }
  return polynomial(std::move(c));
}

double Factor1D::derivative(double x, int m) const {
  switch (kind_) {
    case Kind::Sine:
      return std::pow(a_, m) * std::sin(a_ * x + b_ + m * std::numbers::pi / 2);
    case Kind::Exp:
      return std::pow(a_, m) * std::exp(a_ * x);
    case Kind::Poly: {
      double v = 0.0;
      for (int k = static_cast<int>(poly_.size()) - 1; k >= m; --k) {
        double falling = 1.0;
        for (int t = 0; t < m; ++t) falling *= (k - t);
        v = v * x + poly_[k] * falling;
      }
      return v;
    }
  }
  return 0.0;
}

SeparableTarget::SeparableTarget(std::vector<Factor1D> factors, std::string name)
    : factors_(std::move(factors)), name_(std::move(name)) {}

double SeparableTarget::derivative(std::span<const double> x, std::span<const int> alpha) const {
  double v = 1.0;
  for (std::size_t i = 0; i < factors_.size(); ++i) v *= factors_[i].derivative(x[i], alpha[i]);
  return v;
}

RidgeTarget::RidgeTarget(std::vector<int> monomial, std::vector<double> direction, double phase,
                         Profile profile, std::string name)
    : monomial_(std::move(monomial)),
      direction_(std::move(direction)),
      phase_(phase),
      profile_(profile),
      name_(std::move(name)) {
  if (monomial_.size() != direction_.size())
    throw std::invalid_argument("RidgeTarget: monomial/direction size mismatch");
}

double RidgeTarget::derivative(std::span<const double> x, std::span<const int> alpha) const {
  // Leibniz rule over the monomial factors; the ridge factor contributes w^gamma g^{(|gamma|)}.
  const std::size_t d = monomial_.size();
  double s = phase_;
  for (std::size_t i = 0; i < d; ++i) s += direction_[i] * x[i];
  std::vector<int> beta(d, 0);
  double total = 0.0;
  while (true) {
    double term = 1.0;
    int order = 0;
    for (std::size_t i = 0; i < d && term != 0.0; ++i) {
      const int b = beta[i];
      const int m = monomial_[i];
      double binom = 1.0;
      for (int t = 0; t < b; ++t) binom = binom * (alpha[i] - t) / (t + 1);
      double mono = 0.0;
      if (b <= m) {
        double falling = 1.0;
        for (int t = 0; t < b; ++t) falling *= (m - t);
        mono = falling * std::pow(x[i], m - b);
      }
      const int g = alpha[i] - b;
      term *= binom * mono * std::pow(direction_[i], g);
      order += g;
    }
    if (term != 0.0) {
      const double prof = profile_ == Profile::Sine
                              ? std::sin(s + order * std::numbers::pi / 2)
                              : std::exp(s);
      total += term * prof;
    }
    std::size_t k = 0;
    while (k < d) {
      if (++beta[k] <= std::min(alpha[k], monomial_[k])) break;
      beta[k] = 0;
      ++k;
    }
    if (k == d) break;
  }
  return total;
}

LambdaTarget::LambdaTarget(int dim, int max_order, Fn fn, std::string name)
    : dim_(dim), max_order_(max_order), fn_(std::move(fn)), name_(std::move(name)) {}

double LambdaTarget::derivative(std::span<const double> x, std::span<const int> alpha) const {
  for (int a : alpha)
    if (a > max_order_) throw std::invalid_argument("LambdaTarget: derivative order not available");
  return fn_(x, alpha);
}

std::vector<std::string> builtin_target_ids() {
  return {"sin2pi", "sinpi", "exp_sum", "bump", "sinpi_exp"};
}

std::unique_ptr<Target> make_builtin_target(const std::string& id, int d) {
  if (d < 1) throw std::invalid_argument("make_builtin_target: d must be positive");
  std::vector<Factor1D> f;
  const double pi = std::numbers::pi;
  if (id == "sin2pi") {
    f.assign(d, Factor1D::sine(2 * pi));
  } else if (id == "sinpi") {
    f.assign(d, Factor1D::sine(pi));
  } else if (id == "exp_sum") {
    f.assign(d, Factor1D::exponential(1.0));
  } else if (id == "bump") {
    f.assign(d, Factor1D::bump(3, 64.0));
  } else if (id == "sinpi_exp") {
    f.push_back(Factor1D::sine(pi));
    for (int i = 1; i < d; ++i) f.push_back(Factor1D::exponential(1.0));
  } else {
    throw std::invalid_argument("unknown target id '" + id + "'");
  }
  return std::make_unique<SeparableTarget>(std::move(f), id);
}

}  // namespace sgspline
