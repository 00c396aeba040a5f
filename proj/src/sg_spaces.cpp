#include "sgspline/sg_spaces.hpp"

#include "sgspline/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace sgspline {

std::vector<double> SparseGridFunction::weights() const {
  std::vector<double> w;
  for (const auto& e : set.entries()) w.push_back(e.coefficient);
  return w;
}

double SparseGridFunction::evaluate(std::span<const double> x, std::span<const int> alpha) const {
  if (static_cast<int>(x.size()) != dim())
    throw std::invalid_argument("SparseGridFunction::evaluate: dimension mismatch");
  for (double v : x)
    if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error("SparseGridFunction: point outside [0,1]^d");
  double s = 0.0;
  const auto& entries = set.entries();
  for (std::size_t i = 0; i < terms.size(); ++i) s += entries[i].coefficient * terms[i].evaluate(x, alpha);
  return s;
}

NdArray SparseGridFunction::eval_on_grid(const CompositeRule& grid, std::span<const int> alpha,
                                         Execution exec) const {
  const auto& entries = set.entries();
  NdArray out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    NdArray v = sgspline::eval_on_grid(terms[i], grid, alpha, exec);
    if (i == 0) {
      out = NdArray(v.extents());
    }
    out.axpy(entries[i].coefficient, v);
  }
  return out;
}

SparseGridFunction combination_project(const Target& f, const LevelRule& rule, int r) {
  CombinationSet set(rule);
  const MultiIndex top(rule.d, rule.n);
  const DirectionalField samples =
      DirectionalField::sample(f, rule.p, top, r, CompositeRule(rule.n, rule.p + 1));
  std::vector<int> all(rule.d);
  for (int i = 0; i < rule.d; ++i) all[i] = i;
  SparseGridFunction u{set, {}};
  for (const auto& e : set.entries())
    u.terms.push_back(samples.with_level(e.level).project(all).coefficients());
  return u;
}

double error_norm(const Target& f, const SparseGridFunction& u, NormKind kind, int order,
                  Execution exec) {
  const auto w = u.weights();
  return error_norm(f, u.terms, w, kind, order, exec);
}

std::vector<int> increment_indices(int level, int p, int lambda) {
  if (p < 0) throw std::invalid_argument("increment_indices: negative degree");
  if (level < lambda) throw std::invalid_argument("increment_indices: level below base level");
  std::vector<int> out;
  if (level == lambda) {
    for (int i = 0; i < (1 << level) + p; ++i) out.push_back(i);
    return out;
  }
  // New odd positions, shifted to the middle of the support for higher degrees.
  for (int j = 0; j < (1 << (level - 1)); ++j) out.push_back(2 * j + 1 + p / 2);
  return out;
}

std::size_t HierIncrementBasis::size() const {
  std::size_t s = 1;
  for (const auto& v : selected) s *= v.size();
  return s;
}

std::vector<double> collocation_points(int p, int level) {
  if (p == 0) {
    const int m = 1 << level;
    std::vector<double> x(m);
    for (int i = 0; i < m; ++i) x[i] = (i + 0.5) / m;
    return x;
  }
  return SplineSpace1D(p, level).greville();
}

namespace {

Eigen::MatrixXd univariate_collocation(int p, int level, const std::vector<int>& selected,
                                       const std::vector<double>& points) {
  const SplineSpace1D space(p, level);
  Eigen::MatrixXd b(static_cast<Eigen::Index>(points.size()),
                    static_cast<Eigen::Index>(selected.size()));
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto row = space.eval_basis(points[k], 0);
    for (std::size_t j = 0; j < selected.size(); ++j)
      b(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = row[selected[j]];
  }
  return b;
}

Eigen::MatrixXd hstack(const std::vector<Eigen::MatrixXd>& blocks) {
  Eigen::Index rows = 0, cols = 0;
  for (const auto& b : blocks) {
    rows = b.rows();
    cols += b.cols();
  }
  Eigen::MatrixXd out(rows, cols);
  Eigen::Index c = 0;
  for (const auto& b : blocks) {
    out.middleCols(c, b.cols()) = b;
    c += b.cols();
  }
  return out;
}

std::vector<int> all_indices(int p, int level) {
  std::vector<int> v((1 << level) + p);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<int>(i);
  return v;
}

double max_relative_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q) {
  if (a.cols() == 0) return 0.0;
  const Eigen::MatrixXd res = a - q * (q.transpose() * a);
  double m = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const double n = a.col(j).norm();
    if (n > 0) m = std::max(m, res.col(j).norm() / n);
  }
  return m;
}

}  // namespace

Eigen::MatrixXd kronecker(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Eigen::MatrixXd tensor_collocation(int p, const MultiIndex& level,
                                   const std::vector<std::vector<int>>& selected,
                                   const std::vector<std::vector<double>>& points) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Ones(1, 1);
  for (std::size_t i = 0; i < level.size(); ++i)
    out = kronecker(out, univariate_collocation(p, level[i], selected[i], points[i]));
  return out;
}

ColumnSpace column_space(const Eigen::MatrixXd& a, double rel_tol) {
  ColumnSpace cs;
  if (a.cols() == 0 || a.rows() == 0) {
    cs.basis = Eigen::MatrixXd(a.rows(), 0);
    return cs;
  }
  Eigen::MatrixXd u;
  Eigen::VectorXd s;
  if (a.rows() >= a.cols()) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    const Eigen::Index k = a.cols();
    const Eigen::MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(r, Eigen::ComputeThinU);
    s = svd.singularValues();
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), k);
    u = q * svd.matrixU();
  } else {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU);
    s = svd.singularValues();
    u = svd.matrixU();
  }
  const double smax = s.size() ? s(0) : 0.0;
  while (cs.rank < s.size() && s(cs.rank) > rel_tol * smax) ++cs.rank;
  cs.basis = u.leftCols(cs.rank);
  return cs;
}

std::vector<HierIncrementBasis> hier_basis(const LevelRule& rule) {
  // Direct-sum check of the univariate chain lambda..n.
  std::vector<Eigen::MatrixXd> blocks;
  for (int l = rule.lambda; l <= rule.n; ++l) {
    const auto pts = collocation_points(rule.p, l + 1);
    blocks.clear();
    for (int k = rule.lambda; k <= l; ++k)
      blocks.push_back(univariate_collocation(rule.p, k, increment_indices(k, rule.p, rule.lambda), pts));
    const Eigen::MatrixXd m = hstack(blocks);
    const int rank = column_space(m).rank;
    if (rank != (1 << l) + rule.p || m.cols() != rank)
      throw NumericalError("hier_basis: increments up to level " + std::to_string(l) +
                           " are not a direct sum (rank " + std::to_string(rank) + ")");
  }
  std::vector<HierIncrementBasis> out;
  for (const HierSet hs(rule); const auto& lev : hs.levels()) {
    HierIncrementBasis b{lev, {}};
    for (int v : lev) b.selected.push_back(increment_indices(v, rule.p, rule.lambda));
    out.push_back(std::move(b));
  }
  return out;
}

double HierFunction::evaluate(std::span<const double> x) const {
  const int d = set.rule().d;
  const int p = set.rule().p;
  if (static_cast<int>(x.size()) != d) throw std::invalid_argument("HierFunction: dimension mismatch");
  for (double v : x)
    if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error("HierFunction: point outside [0,1]^d");
  double total = 0.0;
  Eigen::MatrixXd ders;
  for (std::size_t t = 0; t < bases.size(); ++t) {
    const auto& b = bases[t];
    // Per direction: (position in the selection, basis value) for the active functions.
    std::vector<std::vector<std::pair<std::size_t, double>>> active(d);
    for (int i = 0; i < d; ++i) {
      const int first = SplineSpace1D(p, b.level[i]).eval_active(x[i], 0, ders);
      const auto& sel = b.selected[i];
      for (std::size_t j = 0; j < sel.size(); ++j)
        if (sel[j] >= first && sel[j] <= first + p) active[i].push_back({j, ders(0, sel[j] - first)});
    }
    std::vector<std::size_t> ext(d), idx(d);
    for (int i = 0; i < d; ++i) ext[i] = active[i].size();
    const NdArray& c = coefficients[t];
    for_each_index(ext, [&](std::span<const std::size_t> k) {
      double w = 1.0;
      for (int i = 0; i < d; ++i) {
        w *= active[i][k[i]].second;
        idx[i] = active[i][k[i]].first;
      }
      total += w * c[c.flat_index(idx)];
    });
  }
  return total;
}

HierFunction to_hierarchical(const SparseGridFunction& u) {
  const LevelRule& rule = u.set.rule();
  const int d = rule.d;
  HierFunction h{HierSet(rule), hier_basis(rule), {}};
  const std::vector<std::vector<double>> pts(d, collocation_points(rule.p, rule.n + 1));
  std::vector<Eigen::MatrixXd> blocks;
  for (const auto& b : h.bases) blocks.push_back(tensor_collocation(rule.p, b.level, b.selected, pts));
  const Eigen::MatrixXd a = hstack(blocks);
  Eigen::VectorXd rhs(a.rows());
  std::vector<std::size_t> ext(d, pts[0].size());
  std::vector<double> x(d);
  Eigen::Index row = 0;
  for_each_index(ext, [&](std::span<const std::size_t> k) {
    for (int i = 0; i < d; ++i) x[i] = pts[i][k[i]];
    rhs(row++) = u.evaluate(x);
  });
  const Eigen::VectorXd sol = a.colPivHouseholderQr().solve(rhs);
  Eigen::Index off = 0;
  for (const auto& b : h.bases) {
    std::vector<std::size_t> e;
    for (const auto& s : b.selected) e.push_back(s.size());
    NdArray c(e);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = sol(off + static_cast<Eigen::Index>(i));
    off += static_cast<Eigen::Index>(c.size());
    h.coefficients.push_back(std::move(c));
  }
  return h;
}

EquivalenceReport equivalence_report(const LevelRule& rule) {
  const int d = rule.d;
  const std::vector<std::vector<double>> pts(d, collocation_points(rule.p, rule.n + 1));
  std::vector<Eigen::MatrixXd> blocks;
  for (const CombinationSet set(rule); const auto& e : set.entries()) {
    std::vector<std::vector<int>> sel;
    for (int v : e.level) sel.push_back(all_indices(rule.p, v));
    blocks.push_back(tensor_collocation(rule.p, e.level, sel, pts));
  }
  const Eigen::MatrixXd a_comb = hstack(blocks);
  blocks.clear();
  for (const auto& b : hier_basis(rule)) blocks.push_back(tensor_collocation(rule.p, b.level, b.selected, pts));
  const Eigen::MatrixXd a_hier = hstack(blocks);

  const ColumnSpace comb = column_space(a_comb);
  const ColumnSpace hier = column_space(a_hier);
  EquivalenceReport rep;
  rep.dim_combination = comb.rank;
  rep.dim_hierarchical = static_cast<int>(a_hier.cols());
  rep.rank_hierarchical = hier.rank;
  rep.dim_formula = static_cast<long long>(sparse_dimension(rule).sparse);
  rep.cross_residual_max = std::max(max_relative_residual(a_comb, hier.basis),
                                    max_relative_residual(a_hier, comb.basis));
  return rep;
}

double telescopic_residual(const Target& f, int p, const MultiIndex& level, int r) {
  const int d = static_cast<int>(level.size());
  const CompositeRule grid(max_entry(level) + 1, std::min(p + 2, 16));
  const DirectionalField field = DirectionalField::sample(f, p, level, r, grid);
  std::vector<int> all(d);
  for (int i = 0; i < d; ++i) all[i] = i;
  const DirectionalField projected = field.project(all);

  std::vector<std::vector<int>> subsets;
  for (std::uint32_t mask = 1; mask < (1u << d); ++mask) {
    std::vector<int> j;
    for (int i = 0; i < d; ++i)
      if (mask & (1u << i)) j.push_back(i);
    subsets.push_back(std::move(j));
  }
  std::vector<DirectionalField> complements;
  for (const auto& j : subsets) complements.push_back(field.complement(j));

  double worst = 0.0;
  const std::vector<std::size_t> choices(d, r == 0 ? 1 : 2);
  for_each_index(choices, [&](std::span<const std::size_t> c) {
    std::vector<int> alpha(d);
    for (int i = 0; i < d; ++i) alpha[i] = c[i] ? r : 0;
    NdArray diff = field.values(alpha);
    diff -= projected.values(alpha);
    for (std::size_t s = 0; s < subsets.size(); ++s)
      diff.axpy(subsets[s].size() % 2 ? -1.0 : 1.0, complements[s].values(alpha));
    worst = std::max(worst, diff.max_abs());
  });
  return worst;
}

AbstractValues random_abstract_values(std::uint64_t seed) {
  return [seed](std::uint32_t mask, const MultiIndex& level) {
    std::vector<std::uint32_t> key{static_cast<std::uint32_t>(seed),
                                   static_cast<std::uint32_t>(seed >> 32), mask};
    for (std::size_t i = 0; i < level.size(); ++i)
      if (mask & (1u << i)) key.push_back(static_cast<std::uint32_t>(level[i]));
    std::seed_seq seq(key.begin(), key.end());
    std::mt19937_64 gen(seq);
    return std::uniform_real_distribution<double>(-1.0, 1.0)(gen);
  };
}

double CancellationResidual::relative() const {
  return std::abs(lhs - rhs) / std::max(1.0, scale);
}

CancellationResidual cancellation_residual(const LevelRule& rule, const AbstractValues& a) {
  const int d = rule.d, n = rule.n, lambda = rule.lambda;
  const CombinationSet set(rule);
  const std::uint32_t full = (1u << d) - 1;
  CancellationResidual res;
  for (const auto& e : set.entries())
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
      const double t = e.coefficient * a(mask, e.level);
      res.lhs += t;
      res.scale += std::abs(t);
    }

  for (int k = 1; k <= d - 1; ++k) {
    for (int l = 0; l <= d - 2; ++l) {
      BigInt c3 = 0;
      for (int kappa = 0; kappa <= l; ++kappa) {
        BigInt t = binomial(d - 1, kappa) * binomial_poly(d - k - 1 + l - kappa, d - 1 - k);
        c3 += (kappa % 2) ? BigInt(-t) : t;
      }
      if (c3 == 0) continue;
      const double c = static_cast<double>(c3);
      for (std::uint32_t mask = 1; mask < full; ++mask) {
        std::vector<int> dirs;
        for (int i = 0; i < d; ++i)
          if (mask & (1u << i)) dirs.push_back(i);
        if (static_cast<int>(dirs.size()) != k) continue;
        for (const auto& part : compositions(k, n + (k - 1) * lambda - l, lambda)) {
          MultiIndex lev(d, 0);
          for (int j = 0; j < k; ++j) lev[dirs[j]] = part[j];
          res.rhs += c * a(mask, lev);
        }
      }
    }
  }
  for (const auto& e : set.entries()) res.rhs += e.coefficient * a(full, e.level);
  return res;
}

}  // namespace sgspline
