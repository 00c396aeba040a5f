#pragma once

// Analytic target functions on [0,1]^d with closed-form (mixed) derivatives.

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace sgspline {

class Target {
 public:
  virtual ~Target() = default;

  virtual int dim() const = 0;
  /// Largest derivative order available in any single direction.
  virtual int max_order() const = 0;
  /// D^alpha f(x), alpha with dim() entries.
  virtual double derivative(std::span<const double> x, std::span<const int> alpha) const = 0;
  virtual std::string name() const { return "target"; }

  double value(std::span<const double> x) const;
};

/// One-dimensional factor of a separable target.
class Factor1D {
 public:
  /// sin(a x + b)
  static Factor1D sine(double a, double b = 0.0);
  /// exp(a x)
  static Factor1D exponential(double a);
  /// sum_k c_k x^k
  static Factor1D polynomial(std::vector<double> coeffs);
  /// scale * x^a (1-x)^a
  static Factor1D bump(int a, double scale = 1.0);

  double derivative(double x, int m) const;

 private:
  enum class Kind { Sine, Exp, Poly };
  Kind kind_ = Kind::Poly;
  double a_ = 0.0, b_ = 0.0;
  std::vector<double> poly_;
};

/// prod_i g_i(x_i)
class SeparableTarget final : public Target {
 public:
  SeparableTarget(std::vector<Factor1D> factors, std::string name = "separable");

  int dim() const override { return static_cast<int>(factors_.size()); }
  int max_order() const override { return 64; }
  double derivative(std::span<const double> x, std::span<const int> alpha) const override;
  std::string name() const override { return name_; }

  const Factor1D& factor(int i) const { return factors_.at(i); }

 private:
  std::vector<Factor1D> factors_;
  std::string name_;
};

/// (prod_i x_i^{m_i}) * g(w . x + phase) with g = sin or exp.
class RidgeTarget final : public Target {
 public:
  enum class Profile { Sine, Exp };
  RidgeTarget(std::vector<int> monomial, std::vector<double> direction, double phase,
              Profile profile, std::string name = "ridge");

  int dim() const override { return static_cast<int>(monomial_.size()); }
  int max_order() const override { return 64; }
  double derivative(std::span<const double> x, std::span<const int> alpha) const override;
  std::string name() const override { return name_; }

 private:
  std::vector<int> monomial_;
  std::vector<double> direction_;
  double phase_;
  Profile profile_;
  std::string name_;
};

/// Target defined by a callable; derivatives beyond max_order are rejected.
class LambdaTarget final : public Target {
 public:
  using Fn = std::function<double(std::span<const double>, std::span<const int>)>;
  LambdaTarget(int dim, int max_order, Fn fn, std::string name = "lambda");

  int dim() const override { return dim_; }
  int max_order() const override { return max_order_; }
  double derivative(std::span<const double> x, std::span<const int> alpha) const override;
  std::string name() const override { return name_; }

 private:
  int dim_;
  int max_order_;
  Fn fn_;
  std::string name_;
};

/// Built-in targets by id: sin2pi, sinpi, exp_sum, bump, sinpi_exp.
std::unique_ptr<Target> make_builtin_target(const std::string& id, int d);
std::vector<std::string> builtin_target_ids();

}  // namespace sgspline
