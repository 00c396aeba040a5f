#include "sgspline/quad_project.hpp"

#include "sgspline/error.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sgspline {

GramMatrix gram(const SplineSpace1D& space, int r, const QuadratureRule& rule) {
  const int p = space.degree();
  if (r < 0 || r > p) throw std::invalid_argument("gram: need 0 <= r <= p");
  if (rule.points() < p + 1)
    throw std::invalid_argument("gram: rule with " + std::to_string(rule.points()) +
                                " points is not exact for degree " + std::to_string(2 * p));
  const int n = space.dim();
  GramMatrix g{r, Eigen::MatrixXd::Zero(n, n)};
  const double h = space.h();
  Eigen::MatrixXd ders;
  for (int e = 0; e < space.num_elements(); ++e) {
    for (int k = 0; k < rule.points(); ++k) {
      const double x = (e + rule.nodes[k]) * h;
      const double w = rule.weights[k] * h;
      const int first = space.eval_active(x, r, ders);
      for (int i = 0; i <= p; ++i)
        for (int j = 0; j <= p; ++j) g.matrix(first + i, first + j) += w * ders(r, i) * ders(r, j);
    }
  }
  g.matrix = 0.5 * (g.matrix + g.matrix.transpose());
  return g;
}

BasisTable::BasisTable(const SplineSpace1D& space, std::span<const double> nodes, int max_order)
    : space_(space), width_(space.degree() + 1), max_order_(max_order) {
  if (max_order < 0) throw std::invalid_argument("BasisTable: negative derivative order");
  first_.resize(nodes.size());
  values_.resize(nodes.size() * (max_order + 1) * width_);
  Eigen::MatrixXd ders;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    first_[k] = space.eval_active(nodes[k], max_order, ders);
    for (int m = 0; m <= max_order; ++m)
      for (int j = 0; j < width_; ++j) values_[(k * (max_order + 1) + m) * width_ + j] = ders(m, j);
  }
}

void BasisTable::apply(std::span<const double> coeffs, std::span<double> out, int m) const {
  for (std::size_t k = 0; k < first_.size(); ++k) {
    double s = 0.0;
    const double* row = &values_[(k * (max_order_ + 1) + m) * width_];
    for (int j = 0; j < width_; ++j) s += row[j] * coeffs[first_[k] + j];
    out[k] = s;
  }
}

void BasisTable::apply_transpose(std::span<const double> values, std::span<const double> weights,
                                 std::span<double> out, int m) const {
  std::fill(out.begin(), out.begin() + space_.dim(), 0.0);
  for (std::size_t k = 0; k < first_.size(); ++k) {
    const double wv = weights[k] * values[k];
    const double* row = &values_[(k * (max_order_ + 1) + m) * width_];
    for (int j = 0; j < width_; ++j) out[first_[k] + j] += row[j] * wv;
  }
}

Eigen::MatrixXd BasisTable::dense(int m) const {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(num_nodes()), space_.dim());
  for (std::size_t k = 0; k < num_nodes(); ++k)
    for (int j = 0; j < width_; ++j) b(static_cast<Eigen::Index>(k), first_[k] + j) = value(k, m, j);
  return b;
}

AxisProjector::AxisProjector(const SplineSpace1D& space, const CompositeRule& grid, int r)
    : table_(space, grid.nodes(), r), weights_(grid.weights().begin(), grid.weights().end()), r_(r) {
  const int p = space.degree();
  if (r < 0 || r > p) throw std::invalid_argument("AxisProjector: need 0 <= r <= p");
  if (grid.level() < space.level() || grid.points_per_element() < p + 1)
    throw std::invalid_argument("AxisProjector: sampling grid does not resolve the spline space");
  const int n = space.dim();
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t q = 0; q < table_.num_nodes(); ++q) {
    const int f = table_.first(q);
    for (int i = 0; i <= p; ++i)
      for (int j = 0; j <= p; ++j)
        k(f + i, f + j) += weights_[q] * table_.value(q, r, i) * table_.value(q, r, j);
  }
  if (r == 0) {
    mass_.emplace(k);
    if (mass_->info() != Eigen::Success) throw NumericalError("AxisProjector: Gram matrix not SPD");
    return;
  }
  const auto nodes = grid.nodes();
  monomials_.resize(static_cast<Eigen::Index>(nodes.size()), r);
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    double v = 1.0;
    for (int j = 0; j < r; ++j, v *= nodes[q]) monomials_(static_cast<Eigen::Index>(q), j) = v;
  }
  // C(j, i) = (x^j, b_i); rows rescaled to the size of the stiffness block.
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(r, n);
  for (std::size_t q = 0; q < table_.num_nodes(); ++q) {
    const int f = table_.first(q);
    for (int j = 0; j < r; ++j)
      for (int i = 0; i <= p; ++i)
        c(j, f + i) += weights_[q] * monomials_(static_cast<Eigen::Index>(q), j) * table_.value(q, 0, i);
  }
  const double cn = c.cwiseAbs().maxCoeff();
  constraint_scale_ = cn > 0 ? k.cwiseAbs().maxCoeff() / cn : 1.0;
  c *= constraint_scale_;
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + r, n + r);
  kkt.topLeftCorner(n, n) = k;
  kkt.bottomLeftCorner(r, n) = c;
  kkt.topRightCorner(n, r) = c.transpose();
  saddle_.emplace(kkt);
  const double rc = saddle_->rcond();
  if (!(rc > 1e-15)) throw NumericalError("AxisProjector: singular seminorm system");
}

void AxisProjector::stiffness_load(std::span<const double> deriv_values,
                                   std::span<double> rhs) const {
  table_.apply_transpose(deriv_values, weights_, rhs, r_);
  std::fill(rhs.begin() + space().dim(), rhs.begin() + load_size(), 0.0);
}

void AxisProjector::moment_load(std::span<const double> values, std::span<double> rhs) const {
  const int n = space().dim();
  std::fill(rhs.begin(), rhs.begin() + n, 0.0);
  for (int j = 0; j < r_; ++j) {
    double s = 0.0;
    for (std::size_t q = 0; q < values.size(); ++q)
      s += weights_[q] * monomials_(static_cast<Eigen::Index>(q), j) * values[q];
    rhs[n + j] = constraint_scale_ * s;
  }
}

void AxisProjector::solve_load(std::span<const double> rhs, std::span<double> coeffs) const {
  const int n = space().dim();
  if (r_ == 0) {
    Eigen::Map<Eigen::VectorXd> c(coeffs.data(), n);
    c = Eigen::Map<const Eigen::VectorXd>(rhs.data(), n);
    mass_->solveInPlace(c);
    return;
  }
  const Eigen::VectorXd sol = saddle_->solve(Eigen::Map<const Eigen::VectorXd>(rhs.data(), n + r_));
  std::copy(sol.data(), sol.data() + n, coeffs.begin());
}

void AxisProjector::solve(std::span<const double> values, std::span<const double> deriv_values,
                          std::span<double> coeffs) const {
  std::vector<double> rhs(load_size()), extra(load_size());
  stiffness_load(r_ == 0 ? values : deriv_values, rhs);
  if (r_ > 0) {
    moment_load(values, extra);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += extra[i];
  }
  solve_load(rhs, coeffs);
}

std::vector<double> project_1d(const SplineSpace1D& space, const Target& f, int r,
                               const CompositeRule& grid) {
  if (f.dim() != 1) throw std::invalid_argument("project_1d: target must be univariate");
  if (r > f.max_order()) throw std::invalid_argument("project_1d: target lacks derivatives");
  AxisProjector proj(space, grid, r);
  const auto nodes = grid.nodes();
  std::vector<double> v(nodes.size()), vr(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const double x[1] = {nodes[k]};
    const int a0[1] = {0};
    const int ar[1] = {r};
    v[k] = f.derivative(x, a0);
    vr[k] = r == 0 ? v[k] : f.derivative(x, ar);
  }
  std::vector<double> c(space.dim());
  proj.solve(v, vr, c);
  return c;
}

std::vector<double> project_1d(const SplineSpace1D& space, const Target& f, int r) {
  return project_1d(space, f, r, CompositeRule(space.level(), std::min(space.degree() + 2, 16)));
}

namespace {

std::vector<std::size_t> coefficient_extents(int p, const MultiIndex& level) {
  std::vector<std::size_t> ext;
  for (int l : level) ext.push_back(static_cast<std::size_t>((1 << l) + p));
  return ext;
}

void check_level(const MultiIndex& level, int p, const char* who) {
  if (level.empty()) throw std::invalid_argument(std::string(who) + ": empty level");
  if (p < 0) throw std::invalid_argument(std::string(who) + ": negative degree");
  for (int l : level)
    if (l < 1 || l > 30) throw std::invalid_argument(std::string(who) + ": level out of range");
}

}  // namespace

CoefficientTensor::CoefficientTensor(int degree_, MultiIndex level_)
    : degree(degree_), level(std::move(level_)) {
  check_level(level, degree, "CoefficientTensor");
  coefficients = NdArray(coefficient_extents(degree, level));
}

double CoefficientTensor::evaluate(std::span<const double> x, std::span<const int> alpha) const {
  const int d = dim();
  if (static_cast<int>(x.size()) != d) throw std::invalid_argument("evaluate: dimension mismatch");
  std::vector<Eigen::MatrixXd> ders(d);
  std::vector<int> first(d), order(d);
  for (int i = 0; i < d; ++i) {
    order[i] = alpha.empty() ? 0 : alpha[i];
    first[i] = space(i).eval_active(x[i], order[i], ders[i]);
  }
  const std::vector<std::size_t> box(d, static_cast<std::size_t>(degree + 1));
  std::vector<std::size_t> idx(d);
  double s = 0.0;
  for_each_index(box, [&](std::span<const std::size_t> j) {
    double w = 1.0;
    for (int i = 0; i < d; ++i) {
      w *= ders[i](order[i], static_cast<Eigen::Index>(j[i]));
      idx[i] = first[i] + j[i];
    }
    if (w != 0.0) s += w * coefficients[coefficients.flat_index(idx)];
  });
  return s;
}

NdArray eval_on_grid(const CoefficientTensor& u, const CompositeRule& grid,
                     std::span<const int> alpha, Execution exec) {
  const int d = u.dim();
  NdArray cur = u.coefficients;
  for (int a = 0; a < d; ++a) {
    const int m = alpha.empty() ? 0 : alpha[a];
    if (m < 0 || m > u.degree)
      throw std::invalid_argument("eval_on_grid: derivative order exceeds the spline degree");
    BasisTable table(u.space(a), grid.nodes(), m);
    auto ext = cur.extents();
    ext[a] = grid.size();
    NdArray next(ext);
    kernels::transform_fibers(
        cur, next, a, [&](std::span<const double> c, std::span<double> v) { table.apply(c, v, m); },
        exec);
    cur = std::move(next);
  }
  return cur;
}

DirectionalField::DirectionalField(int degree, MultiIndex level, int r, CompositeRule grid)
    : degree_(degree), level_(std::move(level)), r_(r), grid_(std::move(grid)),
      kinds_(level_.size(), AxisKind::Sampled) {}

DirectionalField DirectionalField::sample(const Target& f, int degree, MultiIndex level, int r,
                                          const CompositeRule& grid) {
  check_level(level, degree, "DirectionalField");
  const int d = static_cast<int>(level.size());
  if (f.dim() != d) throw std::invalid_argument("DirectionalField: target dimension mismatch");
  if (r < 0 || r > degree) throw std::invalid_argument("DirectionalField: need 0 <= r <= p");
  if (r > f.max_order())
    throw std::invalid_argument("DirectionalField: target lacks derivatives of order r");
  if (grid.level() < max_entry(level) || grid.points_per_element() < degree + 1)
    throw std::invalid_argument("DirectionalField: sampling grid does not resolve the level");
  DirectionalField field(degree, std::move(level), r, grid);
  const std::vector<std::span<const double>> nodes(d, field.grid_.nodes());
  const std::vector<std::size_t> choices(d, r == 0 ? 1 : 2);
  for_each_index(choices, [&](std::span<const std::size_t> c) {
    std::vector<int> key(d);
    for (int i = 0; i < d; ++i) key[i] = c[i] ? r : 0;
    field.arrays_.emplace(key, kernels::sample_target(f, nodes, key));
  });
  return field;
}

bool DirectionalField::fully_projected() const {
  return std::all_of(kinds_.begin(), kinds_.end(),
                     [](AxisKind k) { return k == AxisKind::Coefficients; });
}

namespace {

std::vector<int> sorted_axes(std::span<const int> axes, int d) {
  std::vector<int> out(axes.begin(), axes.end());
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end())
    throw std::invalid_argument("DirectionalField: repeated direction");
  for (int a : out)
    if (a < 0 || a >= d) throw std::invalid_argument("DirectionalField: direction out of range");
  return out;
}

// Coefficients along `axis` for every fiber of the (values, r-th derivative) pair.
NdArray fiber_coefficients(const AxisProjector& proj, const NdArray& v0, const NdArray& vr,
                           std::size_t axis) {
  auto ext = v0.extents();
  ext[axis] = static_cast<std::size_t>(proj.load_size());
  NdArray rhs(ext);
  const bool seminorm = proj.order() > 0;
  kernels::transform_fibers(
      seminorm ? vr : v0, rhs, axis,
      [&](std::span<const double> in, std::span<double> out) { proj.stiffness_load(in, out); });
  if (seminorm) {
    NdArray moments(ext);
    kernels::transform_fibers(
        v0, moments, axis,
        [&](std::span<const double> in, std::span<double> out) { proj.moment_load(in, out); });
    rhs += moments;
  }
  ext[axis] = static_cast<std::size_t>(proj.space().dim());
  NdArray coeffs(ext);
  kernels::transform_fibers(
      rhs, coeffs, axis,
      [&](std::span<const double> in, std::span<double> out) { proj.solve_load(in, out); });
  return coeffs;
}

NdArray apply_table(const BasisTable& table, const NdArray& in, std::size_t axis, int m) {
  auto ext = in.extents();
  ext[axis] = table.num_nodes();
  NdArray out(ext);
  kernels::transform_fibers(
      in, out, axis, [&](std::span<const double> c, std::span<double> v) { table.apply(c, v, m); });
  return out;
}

}  // namespace

DirectionalField DirectionalField::with_level(MultiIndex level) const {
  check_level(level, degree_, "DirectionalField::with_level");
  if (static_cast<int>(level.size()) != dim())
    throw std::invalid_argument("DirectionalField::with_level: dimension mismatch");
  if (std::any_of(kinds_.begin(), kinds_.end(), [](AxisKind k) { return k != AxisKind::Sampled; }))
    throw std::logic_error("DirectionalField::with_level: field already projected");
  if (grid_.level() < max_entry(level))
    throw std::invalid_argument("DirectionalField::with_level: grid does not resolve the level");
  DirectionalField out = *this;
  out.level_ = std::move(level);
  return out;
}

DirectionalField DirectionalField::project(std::span<const int> axes) const {
  DirectionalField out = *this;
  for (int a : sorted_axes(axes, dim())) {
    if (out.kinds_[a] != AxisKind::Sampled)
      throw std::invalid_argument("DirectionalField::project: direction already projected");
    AxisProjector proj(SplineSpace1D(degree_, level_[a]), grid_, r_);
    std::map<std::vector<int>, NdArray> next;
    for (const auto& [key, arr] : out.arrays_) {
      if (key[a] != 0) continue;
      std::vector<int> kr = key;
      kr[a] = r_;
      next.emplace(key, fiber_coefficients(proj, arr, out.arrays_.at(kr), a));
    }
    out.arrays_ = std::move(next);
    out.kinds_[a] = AxisKind::Coefficients;
  }
  return out;
}

DirectionalField DirectionalField::complement(std::span<const int> axes) const {
  DirectionalField out = *this;
  for (int a : sorted_axes(axes, dim())) {
    if (out.kinds_[a] != AxisKind::Sampled)
      throw std::invalid_argument("DirectionalField::complement: direction already projected");
    AxisProjector proj(SplineSpace1D(degree_, level_[a]), grid_, r_);
    for (auto& [key, arr] : out.arrays_) {
      if (key[a] != 0) continue;
      std::vector<int> kr = key;
      kr[a] = r_;
      NdArray& deriv = out.arrays_.at(kr);
      const NdArray c = fiber_coefficients(proj, arr, deriv, a);
      arr -= apply_table(proj.table(), c, a, 0);
      if (r_ > 0) deriv -= apply_table(proj.table(), c, a, r_);
    }
  }
  return out;
}

NdArray DirectionalField::values(std::span<const int> alpha) const {
  const int d = dim();
  std::vector<int> a(d, 0);
  if (!alpha.empty()) {
    if (static_cast<int>(alpha.size()) != d)
      throw std::invalid_argument("DirectionalField::values: dimension mismatch");
    a.assign(alpha.begin(), alpha.end());
  }
  std::vector<int> key(d, 0);
  for (int i = 0; i < d; ++i) {
    if (kinds_[i] == AxisKind::Sampled) {
      if (a[i] != 0 && a[i] != r_)
        throw std::invalid_argument("DirectionalField::values: sampled direction carries only "
                                    "orders 0 and r");
      key[i] = a[i];
    } else if (a[i] < 0 || a[i] > degree_) {
      throw std::invalid_argument("DirectionalField::values: derivative order exceeds degree");
    }
  }
  NdArray cur = arrays_.at(key);
  for (int i = 0; i < d; ++i) {
    if (kinds_[i] != AxisKind::Coefficients) continue;
    BasisTable table(SplineSpace1D(degree_, level_[i]), grid_.nodes(), a[i]);
    cur = apply_table(table, cur, i, a[i]);
  }
  return cur;
}

CoefficientTensor DirectionalField::coefficients() const {
  if (!fully_projected())
    throw std::logic_error("DirectionalField::coefficients: not every direction is projected");
  CoefficientTensor t(degree_, level_);
  t.coefficients = arrays_.at(std::vector<int>(dim(), 0));
  return t;
}

CompositeRule projection_grid(int degree, const MultiIndex& level) {
  return CompositeRule(std::max(1, max_entry(level)), std::min(degree + 1, 16));
}

DirectionalField project_tensor(const MultiIndex& level, int p, const Target& f,
                                std::span<const int> directions, int r,
                                const CompositeRule& grid) {
  return DirectionalField::sample(f, p, level, r, grid).project(directions);
}

DirectionalField project_tensor(const MultiIndex& level, int p, const Target& f,
                                std::span<const int> directions, int r) {
  check_level(level, p, "project_tensor");
  return project_tensor(level, p, f, directions, r, projection_grid(p, level));
}

std::vector<MultiIndex> norm_multi_indices(int d, NormKind kind, int order) {
  if (d < 1 || order < 0) throw std::invalid_argument("norm_multi_indices: bad arguments");
  std::vector<MultiIndex> out;
  const std::vector<std::size_t> box(d, static_cast<std::size_t>(order + 1));
  for_each_index(box, [&](std::span<const std::size_t> idx) {
    MultiIndex a(idx.begin(), idx.end());
    const int s = l1_norm(a), m = max_entry(a);
    bool keep = false;
    switch (kind) {
      case NormKind::Seminorm: keep = s == order; break;
      case NormKind::Norm: keep = s <= order; break;
      case NormKind::MixedSeminorm: keep = m == order; break;
      case NormKind::MixedNorm: keep = true; break;
    }
    if (keep) out.push_back(std::move(a));
  });
  return out;
}

namespace {

double norm_on_grid(const Target& f, std::span<const CoefficientTensor> terms,
                    std::span<const double> weights, NormKind kind, int order,
                    const CompositeRule& grid, Execution exec) {
  const int d = f.dim();
  const std::vector<std::span<const double>> nodes(d, grid.nodes());
  const std::vector<std::span<const double>> w(d, grid.weights());
  double total = 0.0;
  for (const MultiIndex& a : norm_multi_indices(d, kind, order)) {
    NdArray diff = kernels::sample_target(f, nodes, a, exec);
    for (std::size_t t = 0; t < terms.size(); ++t)
      diff.axpy(-weights[t], eval_on_grid(terms[t], grid, a, exec));
    total += kernels::weighted_sum_squares(diff, w, exec);
  }
  return std::sqrt(total);
}

}  // namespace

double error_norm(const Target& f, std::span<const CoefficientTensor> terms,
                  std::span<const double> weights, NormKind kind, int order, Execution exec) {
  if (terms.size() != weights.size())
    throw std::invalid_argument("error_norm: one weight per term required");
  int p = 0, level = 1;
  for (const auto& t : terms) {
    if (t.dim() != f.dim()) throw std::invalid_argument("error_norm: dimension mismatch");
    p = std::max(p, t.degree);
    level = std::max(level, max_entry(t.level));
  }
  if (order < 0) throw std::invalid_argument("error_norm: negative order");
  // Every kind includes a pure derivative of order `order` in some direction.
  for (const auto& t : terms)
    if (order > t.degree)
      throw std::invalid_argument("error_norm: derivative order " + std::to_string(order) +
                                  " exceeds spline degree " + std::to_string(t.degree));
  return norm_on_grid(f, terms, weights, kind, order, CompositeRule(level, std::min(p + 3, 16)),
                      exec);
}

double error_norm(const Target& f, const CoefficientTensor& u, NormKind kind, int order) {
  const double one = 1.0;
  return error_norm(f, std::span<const CoefficientTensor>(&u, 1), std::span<const double>(&one, 1),
                    kind, order);
}

double target_norm(const Target& f, NormKind kind, int order, const CompositeRule& grid) {
  return norm_on_grid(f, {}, {}, kind, order, grid, Execution::Parallel);
}

}  // namespace sgspline
