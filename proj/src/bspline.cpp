#include "sgspline/bspline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sgspline {

double Dyadic::value() const noexcept {
  return std::ldexp(static_cast<double>(numerator), -exponent);
}

KnotVector::KnotVector(int degree, int level) : degree_(degree), level_(level) {
  if (degree < 0) throw std::invalid_argument("KnotVector: negative degree");
  if (level < 0 || level > 30) throw std::invalid_argument("KnotVector: level out of range");
  const std::int64_t cells = std::int64_t{1} << level;
  exact_.reserve(static_cast<std::size_t>(cells - 1 + 2 * (degree + 1)));
  for (int i = 0; i <= degree; ++i) exact_.push_back({0, 0});
  for (std::int64_t j = 1; j < cells; ++j) exact_.push_back({j, level});
  for (int i = 0; i <= degree; ++i) exact_.push_back({1, 0});
  values_.reserve(exact_.size());
  for (const auto& k : exact_) values_.push_back(k.value());
}

SplineSpace1D::SplineSpace1D(int degree, int level) : knots_(degree, level) {}

int SplineSpace1D::element_of(double x) const noexcept {
  const int cells = num_elements();
  int e = static_cast<int>(std::floor(x * cells));
  return std::clamp(e, 0, cells - 1);
}

namespace {

// Derivatives of the p+1 nonzero B-splines on knot span s (Piegl & Tiller, A2.3).
void ders_basis_funs(int s, double u, int p, int n, std::span<const double> U,
                     Eigen::MatrixXd& ders) {
  Eigen::MatrixXd ndu(p + 1, p + 1);
  Eigen::MatrixXd a(2, p + 1);
  std::vector<double> left(p + 1), right(p + 1);
  ndu(0, 0) = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = u - U[s + 1 - j];
    right[j] = U[s + j] - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu(j, r) = right[r + 1] + left[j - r];
      const double temp = ndu(r, j - 1) / ndu(j, r);
      ndu(r, j) = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu(j, j) = saved;
  }
  ders.setZero(n + 1, p + 1);
  for (int j = 0; j <= p; ++j) ders(0, j) = ndu(j, p);
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a(0, 0) = 1.0;
    for (int k = 1; k <= n; ++k) {
      double d = 0.0;
      const int rk = r - k;
      const int pk = p - k;
      if (r >= k) {
        a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
        d = a(s2, 0) * ndu(rk, pk);
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
        d += a(s2, j) * ndu(rk + j, pk);
      }
      if (r <= pk) {
        a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
        d += a(s2, k) * ndu(r, pk);
      }
      ders(k, r) = d;
      std::swap(s1, s2);
    }
  }
  double factor = p;
  for (int k = 1; k <= n; ++k) {
    for (int j = 0; j <= p; ++j) ders(k, j) *= factor;
    factor *= (p - k);
  }
}

}  // namespace

int SplineSpace1D::eval_active(double x, int max_order, Eigen::MatrixXd& out) const {
  const int p = degree();
  const int e = element_of(x);
  const int n = std::min(max_order, p);
  ders_basis_funs(e + p, x, p, n, knots_.values(), out);
  if (max_order > p) {
    Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(max_order + 1, p + 1);
    padded.topRows(n + 1) = out;
    out = std::move(padded);
  }
  return e;
}

std::vector<double> SplineSpace1D::eval_basis(double x, int m) const {
  if (m < 0 || m > degree())
    throw std::invalid_argument("eval_basis: derivative order must be in [0, p]");
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("eval_basis: x outside [0,1]");
  Eigen::MatrixXd ders;
  const int first = eval_active(x, m, ders);
  std::vector<double> out(static_cast<std::size_t>(dim()), 0.0);
  for (int j = 0; j <= degree(); ++j) out[static_cast<std::size_t>(first + j)] = ders(m, j);
  return out;
}

double SplineSpace1D::evaluate(std::span<const double> coeffs, double x, int m) const {
  if (static_cast<int>(coeffs.size()) != dim())
    throw std::invalid_argument("evaluate: coefficient count does not match dimension");
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("evaluate: x outside [0,1]");
  if (m < 0) throw std::invalid_argument("evaluate: negative derivative order");
  if (m > degree()) return 0.0;
  Eigen::MatrixXd ders;
  const int first = eval_active(x, m, ders);
  double v = 0.0;
  for (int j = 0; j <= degree(); ++j) v += coeffs[static_cast<std::size_t>(first + j)] * ders(m, j);
  return v;
}

std::vector<double> SplineSpace1D::greville() const {
  const int p = degree();
  const auto t = knots_.values();
  std::vector<double> g(static_cast<std::size_t>(dim()));
  for (int i = 0; i < dim(); ++i) {
    if (p == 0) {
      g[i] = 0.5 * (t[i] + t[i + 1]);
    } else {
      double s = 0.0;
      for (int k = 1; k <= p; ++k) s += t[i + k];
      g[i] = s / p;
    }
  }
  return g;
}

SplineSpace1D make_space(int p, int level) {
  if (p < 0) throw std::invalid_argument("make_space: degree must be nonnegative");
  if (level <= 0) throw std::invalid_argument("make_space: level must be positive");
  return SplineSpace1D(p, level);
}

Eigen::MatrixXd refinement_operator(const SplineSpace1D& coarse, const SplineSpace1D& fine) {
  if (coarse.degree() != fine.degree())
    throw std::invalid_argument("refinement_operator: degree mismatch");
  if (fine.level() != coarse.level() + 1)
    throw std::invalid_argument("refinement_operator: levels must be consecutive");
  const int p = coarse.degree();
  std::vector<double> t(coarse.knots().values().begin(), coarse.knots().values().end());
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(coarse.dim(), coarse.dim());
  // Boehm insertion of every odd dyadic point of the fine level, left to right.
  const int fine_cells = fine.num_elements();
  for (int j = 1; j < fine_cells; j += 2) {
    const double x = std::ldexp(static_cast<double>(j), -fine.level());
    const int k = static_cast<int>(std::upper_bound(t.begin(), t.end(), x) - t.begin()) - 1;
    const int n = static_cast<int>(P.rows());
    Eigen::MatrixXd Q(n + 1, P.cols());
    for (int i = 0; i <= k - p; ++i) Q.row(i) = P.row(i);
    for (int i = k - p + 1; i <= k; ++i) {
      const double alpha = (x - t[i]) / (t[i + p] - t[i]);
      Q.row(i) = alpha * P.row(i) + (1.0 - alpha) * P.row(i - 1);
    }
    for (int i = k + 1; i <= n; ++i) Q.row(i) = P.row(i - 1);
    t.insert(t.begin() + k + 1, x);
    P = std::move(Q);
  }
  if (P.rows() != fine.dim()) throw std::logic_error("refinement_operator: size mismatch");
  return P;
}

Eigen::MatrixXd refinement_chain(const SplineSpace1D& coarse, int target_level) {
  if (target_level < coarse.level())
    throw std::invalid_argument("refinement_chain: target level below source level");
  Eigen::MatrixXd R = Eigen::MatrixXd::Identity(coarse.dim(), coarse.dim());
  SplineSpace1D current = coarse;
  while (current.level() < target_level) {
    SplineSpace1D next(current.degree(), current.level() + 1);
    R = refinement_operator(current, next) * R;
    current = next;
  }
  return R;
}

ConstrainedSubspace1D::ConstrainedSubspace1D(SplineSpace1D parent, int order,
                                             Eigen::MatrixXd basis,
                                             std::vector<int> constraint_orders)
    : parent_(std::move(parent)),
      order_(order),
      basis_(std::move(basis)),
      constraint_orders_(std::move(constraint_orders)) {}

ConstrainedSubspace1D vanishing_subspace(const SplineSpace1D& space, int q) {
  const int p = space.degree();
  if (q < 0 || q > p) throw std::invalid_argument("vanishing_subspace: q must be in [0, p]");
  std::vector<int> orders;
  for (int o = q; o < p; o += 2) orders.push_back(o);

  const int n = space.dim();
  const int c = static_cast<int>(orders.size());
  // The order-o endpoint derivative at 0 touches coefficients 0..o with a nonzero
  // weight on o; at 1 it touches n-1-o..n-1. Pivot on those columns.
  const int max_order = orders.empty() ? -1 : orders.back();
  const bool disjoint = max_order < n - 1 - max_order;
  if (!disjoint) {
    Eigen::MatrixXd A(2 * c, n);
    for (int i = 0; i < c; ++i) {
      const auto l = space.eval_basis(0.0, orders[i]);
      const auto r = space.eval_basis(1.0, orders[i]);
      for (int j = 0; j < n; ++j) {
        A(2 * i, j) = l[j];
        A(2 * i + 1, j) = r[j];
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    Eigen::MatrixXd kernel = lu.kernel();
    if (lu.rank() == 0) kernel = Eigen::MatrixXd::Identity(n, n);
    return ConstrainedSubspace1D(space, q, kernel, orders);
  }

  std::vector<bool> pivot(static_cast<std::size_t>(n), false);
  for (int o : orders) {
    pivot[o] = true;
    pivot[n - 1 - o] = true;
  }
  std::vector<std::vector<double>> left_rows, right_rows;
  for (int o : orders) {
    left_rows.push_back(space.eval_basis(0.0, o));
    right_rows.push_back(space.eval_basis(1.0, o));
  }
  std::vector<int> free_cols;
  for (int j = 0; j < n; ++j)
    if (!pivot[j]) free_cols.push_back(j);

  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(n, static_cast<int>(free_cols.size()));
  for (int col = 0; col < static_cast<int>(free_cols.size()); ++col) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    v[free_cols[col]] = 1.0;
    for (int i = 0; i < c; ++i) {
      const int o = orders[i];
      double s = 0.0;
      for (int j = 0; j < o; ++j) s += left_rows[i][j] * v[j];
      v[o] = -s / left_rows[i][o];
      const int pc = n - 1 - o;
      s = 0.0;
      for (int j = pc + 1; j < n; ++j) s += right_rows[i][j] * v[j];
      v[pc] = -s / right_rows[i][pc];
    }
    Z.col(col) = v;
  }
  return ConstrainedSubspace1D(space, q, std::move(Z), std::move(orders));
}

}  // namespace sgspline
