#include "sgspline/geometry.hpp"

#include "sgspline/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sgspline {

namespace {

constexpr int kSampleGrid = 33;
constexpr int kLattice = 17;

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

std::vector<double> uniform_points(int m) {
  std::vector<double> x(m);
  for (int i = 0; i < m; ++i) x[i] = static_cast<double>(i) / (m - 1);
  return x;
}

}  // namespace

GeometryMap::GeometryMap(int degree, int dims, std::vector<Eigen::VectorXd> control_points, int level)
    : degree_(degree), dims_(dims), level_(level), points_(std::move(control_points)) {
  if (degree < 1) throw std::invalid_argument("GeometryMap: degree must be >= 1");
  if (dims < 1 || dims > 3) throw std::invalid_argument("GeometryMap: dims must be 1, 2 or 3");
  if (level < 0 || level > 10) throw std::invalid_argument("GeometryMap: level out of range");
  const std::size_t expected = ipow(static_cast<std::size_t>((1 << level) + degree), dims);
  if (points_.size() != expected)
    throw std::invalid_argument("GeometryMap: expected " + std::to_string(expected) +
                                " control points, got " + std::to_string(points_.size()));
  for (const auto& p : points_)
    if (p.size() != dims) throw std::invalid_argument("GeometryMap: control point dimension mismatch");

  const std::vector<std::size_t> box(dims, kSampleGrid);
  const auto s = uniform_points(kSampleGrid);
  min_det_ = std::numeric_limits<double>::infinity();
  std::vector<double> xi(dims);
  for_each_index(box, [&](std::span<const std::size_t> k) {
    for (int i = 0; i < dims; ++i) xi[i] = s[k[i]];
    min_det_ = std::min(min_det_, jacobian(xi).determinant());
  });
  if (!(min_det_ > 0.0))
    throw NumericalError("GeometryMap: Jacobian determinant not positive on the sample grid (min " +
                         std::to_string(min_det_) + ")");

  const std::vector<std::size_t> lat(dims, kLattice);
  const auto l = uniform_points(kLattice);
  for_each_index(lat, [&](std::span<const std::size_t> k) {
    Eigen::VectorXd v(dims);
    for (int i = 0; i < dims; ++i) v(i) = l[k[i]];
    lattice_xi_.push_back(v);
    lattice_x_.push_back(eval_map(std::span<const double>(v.data(), dims)));
  });
}

void GeometryMap::eval(std::span<const double> xi, Eigen::VectorXd& x, Eigen::MatrixXd& jac) const {
  if (static_cast<int>(xi.size()) != dims_) throw std::invalid_argument("GeometryMap: dimension mismatch");
  for (double v : xi)
    if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error("GeometryMap: point outside [0,1]^d");
  const SplineSpace1D sp = space();
  const int d = dims_, p = degree_, n = sp.dim();
  Eigen::MatrixXd ders[3];
  int first[3];
  for (int i = 0; i < d; ++i) first[i] = sp.eval_active(xi[i], 1, ders[i]);
  x = Eigen::VectorXd::Zero(d);
  jac = Eigen::MatrixXd::Zero(d, d);
  const std::vector<std::size_t> box(d, static_cast<std::size_t>(p + 1));
  for_each_index(box, [&](std::span<const std::size_t> j) {
    std::size_t flat = 0;
    double b = 1.0;
    for (int i = 0; i < d; ++i) {
      flat = flat * n + first[i] + j[i];
      b *= ders[i](0, static_cast<Eigen::Index>(j[i]));
    }
    const Eigen::VectorXd& P = points_[flat];
    x += b * P;
    for (int k = 0; k < d; ++k) {
      double g = 1.0;
      for (int i = 0; i < d; ++i) g *= ders[i](i == k ? 1 : 0, static_cast<Eigen::Index>(j[i]));
      jac.col(k) += g * P;
    }
  });
}

Eigen::VectorXd GeometryMap::eval_map(std::span<const double> xi) const {
  Eigen::VectorXd x;
  Eigen::MatrixXd j;
  eval(xi, x, j);
  return x;
}

Eigen::MatrixXd GeometryMap::jacobian(std::span<const double> xi) const {
  Eigen::VectorXd x;
  Eigen::MatrixXd j;
  eval(xi, x, j);
  return j;
}

Eigen::VectorXd GeometryMap::inverse_map(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dims_) throw std::invalid_argument("inverse_map: dimension mismatch");
  const Eigen::Map<const Eigen::VectorXd> target(x.data(), dims_);
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lattice_x_.size(); ++i) {
    const double dist = (lattice_x_[i] - target).squaredNorm();
    if (dist < best_d) {
      best_d = dist;
      best = i;
    }
  }
  Eigen::VectorXd xi = lattice_xi_[best];
  Eigen::VectorXd fx;
  Eigen::MatrixXd jac;
  double best_res = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 50; ++it) {
    eval(std::span<const double>(xi.data(), dims_), fx, jac);
    const double res = (fx - target).norm();
    best_res = std::min(best_res, res);
    if (res < 1e-12) return xi;
    if (!(std::abs(jac.determinant()) > 1e-14)) throw NumericalError("inverse_map: singular Jacobian");
    xi -= jac.partialPivLu().solve(fx - target);
    xi = xi.cwiseMax(0.0).cwiseMin(1.0);
  }
  throw ConvergenceError("inverse_map: Newton did not converge in 50 iterations", best_res);
}

GeometryMap GeometryMap::refined(int level) const {
  if (level < level_) throw std::invalid_argument("GeometryMap::refined: level below current level");
  const Eigen::MatrixXd r = refinement_chain(space(), level);
  const std::size_t nc = static_cast<std::size_t>(space().dim());
  std::vector<Eigen::VectorXd> pts;
  std::vector<NdArray> comps;
  for (int c = 0; c < dims_; ++c) {
    NdArray a(std::vector<std::size_t>(dims_, nc));
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = points_[i](c);
    for (int axis = 0; axis < dims_; ++axis) {
      auto ext = a.extents();
      ext[axis] = static_cast<std::size_t>(r.rows());
      NdArray next(ext);
      kernels::transform_fibers(a, next, axis, [&](std::span<const double> in, std::span<double> out) {
        Eigen::Map<Eigen::VectorXd>(out.data(), r.rows()) =
            r * Eigen::Map<const Eigen::VectorXd>(in.data(), r.cols());
      });
      a = std::move(next);
    }
    comps.push_back(std::move(a));
  }
  for (std::size_t i = 0; i < comps[0].size(); ++i) {
    Eigen::VectorXd v(dims_);
    for (int c = 0; c < dims_; ++c) v(c) = comps[c][i];
    pts.push_back(v);
  }
  return GeometryMap(degree_, dims_, std::move(pts), level);
}

GeometryMap GeometryMap::identity(int d, int degree) {
  return affine(Eigen::MatrixXd::Identity(d, d), Eigen::VectorXd::Zero(d), degree);
}

GeometryMap GeometryMap::affine(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int degree) {
  const int d = static_cast<int>(a.rows());
  if (a.cols() != d || b.size() != d) throw std::invalid_argument("affine: shape mismatch");
  const auto g = SplineSpace1D(degree, 0).greville();
  std::vector<Eigen::VectorXd> pts;
  const std::vector<std::size_t> box(d, g.size());
  for_each_index(box, [&](std::span<const std::size_t> k) {
    Eigen::VectorXd xi(d);
    for (int i = 0; i < d; ++i) xi(i) = g[k[i]];
    pts.push_back(a * xi + b);
  });
  return GeometryMap(degree, d, std::move(pts));
}

GeometryMap GeometryMap::distorted_square() {
  GeometryMap id = identity(2, 2);
  auto pts = id.control_points();
  pts[4] += Eigen::Vector2d(0.15, 0.15);
  return GeometryMap(2, 2, std::move(pts));
}

GeometryMap GeometryMap::builtin(const std::string& name) {
  if (name == "identity") return identity(2);
  if (name == "shear") {
    Eigen::MatrixXd a(2, 2);
    a << 1.0, 0.4, 0.0, 1.0;
    return affine(a, Eigen::VectorXd::Zero(2));
  }
  if (name == "distorted") return distorted_square();
  throw std::invalid_argument("unknown geometry '" + name + "'");
}

std::vector<std::string> GeometryMap::builtin_names() { return {"identity", "shear", "distorted"}; }

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int parse_int(const std::string& v, int line, const std::string& key) {
  try {
    std::size_t used = 0;
    const int x = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("geometry line " + std::to_string(line) + ": key '" + key +
                                "' expects an integer, got '" + v + "'");
  }
}

}  // namespace

GeometryMap GeometryMap::parse(std::istream& in) {
  int degree = -1, dims = -1, level = 0;
  bool in_points = false;
  std::vector<Eigen::VectorXd> pts;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (in_points) {
      std::istringstream ss(s);
      std::vector<double> v;
      std::string tok;
      while (ss >> tok) {
        try {
          std::size_t used = 0;
          v.push_back(std::stod(tok, &used));
          if (used != tok.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
          throw std::invalid_argument("geometry line " + std::to_string(line) +
                                      ": bad coordinate '" + tok + "'");
        }
      }
      if (static_cast<int>(v.size()) != dims)
        throw std::invalid_argument("geometry line " + std::to_string(line) + ": expected " +
                                    std::to_string(dims) + " coordinates");
      pts.push_back(Eigen::Map<Eigen::VectorXd>(v.data(), dims));
      continue;
    }
    if (s == "control_points") {
      if (degree < 0 || dims < 0)
        throw std::invalid_argument("geometry line " + std::to_string(line) +
                                    ": 'degree' and 'dims' must precede control_points");
      in_points = true;
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("geometry line " + std::to_string(line) + ": expected key = value");
    const std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
    if (key == "degree") degree = parse_int(value, line, key);
    else if (key == "dims") dims = parse_int(value, line, key);
    else if (key == "level") level = parse_int(value, line, key);
    else throw std::invalid_argument("geometry line " + std::to_string(line) + ": unknown key '" + key + "'");
  }
  if (!in_points) throw std::invalid_argument("geometry: missing control_points block");
  return GeometryMap(degree, dims, std::move(pts), level);
}

GeometryMap GeometryMap::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open geometry file '" + path + "'");
  return parse(in);
}

void GeometryMap::write(std::ostream& out) const {
  out << "degree = " << degree_ << "\ndims = " << dims_ << "\n";
  if (level_ > 0) out << "level = " << level_ << "\n";
  out << "control_points\n";
  out.precision(17);
  for (const auto& p : points_) {
    for (int i = 0; i < dims_; ++i) out << (i ? " " : "") << p(i);
    out << "\n";
  }
}

double PhysicalFunction::operator()(std::span<const double> x) const {
  const Eigen::VectorXd xi = map_.inverse_map(x);
  return param_(std::span<const double>(xi.data(), static_cast<std::size_t>(xi.size())));
}

double PulledBackTarget::derivative(std::span<const double> xi, std::span<const int> alpha) const {
  for (int a : alpha)
    if (a != 0) throw std::invalid_argument("PulledBackTarget: only values are available");
  const Eigen::VectorXd x = map_.eval_map(xi);
  const std::vector<int> zero(static_cast<std::size_t>(map_.dim()), 0);
  return f_.derivative(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())), zero);
}

double pullback_error_norm(const Target& f_phys, std::span<const CoefficientTensor> terms,
                           std::span<const double> weights, const GeometryMap& map,
                           NormKind kind, int order, Execution exec) {
  const int d = map.dim();
  if (order < 0 || order > 1) throw std::invalid_argument("pullback_error_norm: order must be 0 or 1");
  if (kind != NormKind::Norm && kind != NormKind::Seminorm)
    throw std::invalid_argument("pullback_error_norm: only Sobolev norms and seminorms");
  if (f_phys.dim() != d) throw std::invalid_argument("pullback_error_norm: dimension mismatch");
  if (terms.size() != weights.size()) throw std::invalid_argument("pullback_error_norm: weights");
  int p = 0, level = 1;
  for (const auto& t : terms) {
    if (t.dim() != d) throw std::invalid_argument("pullback_error_norm: dimension mismatch");
    if (order > t.degree) throw std::invalid_argument("pullback_error_norm: order exceeds degree");
    p = std::max(p, t.degree);
    level = std::max(level, max_entry(t.level));
  }
  const CompositeRule grid(level, std::min(p + 3, 16));
  const bool want_l2 = order == 0 || kind == NormKind::Norm;
  const bool want_h1 = order == 1;

  auto combine = [&](std::span<const int> alpha) {
    NdArray out;
    for (std::size_t t = 0; t < terms.size(); ++t) {
      NdArray v = eval_on_grid(terms[t], grid, alpha, exec);
      if (t == 0) out = NdArray(v.extents());
      out.axpy(weights[t], v);
    }
    if (terms.empty()) out = NdArray(std::vector<std::size_t>(d, grid.size()));
    return out;
  };
  const NdArray u0 = combine(std::vector<int>(d, 0));
  std::vector<NdArray> grad;
  if (want_h1)
    for (int k = 0; k < d; ++k) {
      std::vector<int> a(d, 0);
      a[k] = 1;
      grad.push_back(combine(a));
    }

  const auto nodes = grid.nodes();
  const auto w = grid.weights();
  const std::size_t lead = grid.size();
  const std::size_t block = u0.size() / lead;
  std::vector<double> partial(lead, 0.0);

  auto row = [&](std::int64_t i0) {
    std::vector<std::size_t> idx(d, 0);
    idx[0] = static_cast<std::size_t>(i0);
    std::vector<double> xi(d);
    std::vector<int> alpha(d, 0);
    Eigen::VectorXd x, gref(d), gphys(d);
    Eigen::MatrixXd jac;
    double acc = 0.0;
    for (std::size_t f = 0; f < block; ++f) {
      std::size_t rem = f;
      for (int k = d - 1; k >= 1; --k) {
        idx[k] = rem % lead;
        rem /= lead;
      }
      double wt = 1.0;
      for (int k = 0; k < d; ++k) {
        xi[k] = nodes[idx[k]];
        wt *= w[idx[k]];
      }
      map.eval(xi, x, jac);
      const double det = std::abs(jac.determinant());
      const std::size_t flat = static_cast<std::size_t>(i0) * block + f;
      const std::span<const double> xs(x.data(), static_cast<std::size_t>(d));
      double e = 0.0;
      if (want_l2) {
        std::fill(alpha.begin(), alpha.end(), 0);
        const double diff = f_phys.derivative(xs, alpha) - u0[flat];
        e += diff * diff;
      }
      if (want_h1) {
        for (int k = 0; k < d; ++k) gref(k) = grad[k][flat];
        gphys = jac.transpose().partialPivLu().solve(gref);
        for (int k = 0; k < d; ++k) {
          std::fill(alpha.begin(), alpha.end(), 0);
          alpha[k] = 1;
          const double diff = f_phys.derivative(xs, alpha) - gphys(k);
          e += diff * diff;
        }
      }
      acc += wt * det * e;
    }
    partial[static_cast<std::size_t>(i0)] = acc;
  };
  const std::int64_t n = static_cast<std::int64_t>(lead);
  if (exec == Execution::Serial) {
    for (std::int64_t i = 0; i < n; ++i) row(i);
  } else {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) row(i);
  }
  double total = 0.0;
  for (double v : partial) total += v;
  return std::sqrt(total);
}

double pullback_error_norm(const Target& f_phys, const SparseGridFunction& u,
                           const GeometryMap& map, NormKind kind, int order, Execution exec) {
  const auto w = u.weights();
  return pullback_error_norm(f_phys, u.terms, w, map, kind, order, exec);
}

MappedGram mapped_gram(const GeometryMap& map, int p, int level, Execution exec) {
  const int d = map.dim();
  const SplineSpace1D space = make_space(p, level);
  const CompositeRule rule(level, std::min(p + 2, 16));
  const BasisTable table(space, rule.nodes(), 1);
  const std::size_t nq = rule.size();
  const int n1 = space.dim();
  const std::size_t total_q = ipow(nq, d);
  const std::size_t total_b = ipow(static_cast<std::size_t>(n1), d);

  // Per quadrature node: |det J| times the tensor weight, and J^{-T}.
  std::vector<double> wdet(total_q);
  std::vector<Eigen::MatrixXd> jinv_t(total_q);
  {
    const std::vector<std::size_t> box(d, nq);
    std::size_t flat = 0;
    std::vector<double> xi(d);
    Eigen::VectorXd x;
    Eigen::MatrixXd jac;
    for_each_index(box, [&](std::span<const std::size_t> k) {
      double w = 1.0;
      for (int i = 0; i < d; ++i) {
        xi[i] = rule.nodes()[k[i]];
        w *= rule.weights()[k[i]];
      }
      map.eval(xi, x, jac);
      wdet[flat] = w * std::abs(jac.determinant());
      jinv_t[flat] = jac.inverse().transpose();
      ++flat;
    });
  }
  // Nodes at which each univariate basis function is active, with its local position.
  std::vector<std::vector<std::pair<std::size_t, int>>> support(n1);
  for (std::size_t q = 0; q < nq; ++q)
    for (int j = 0; j <= p; ++j) support[table.first(q) + j].push_back({q, j});

  MappedGram g{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(total_b), static_cast<Eigen::Index>(total_b)),
               Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(total_b), static_cast<Eigen::Index>(total_b))};

  auto assemble_row = [&](std::int64_t row) {
    std::vector<int> bi(d);
    {
      std::size_t rem = static_cast<std::size_t>(row);
      for (int k = d - 1; k >= 0; --k) {
        bi[k] = static_cast<int>(rem % n1);
        rem /= n1;
      }
    }
    std::vector<std::size_t> ext(d);
    for (int k = 0; k < d; ++k) ext[k] = support[bi[k]].size();
    const std::vector<std::size_t> local(d, static_cast<std::size_t>(p + 1));
    Eigen::VectorXd gi(d), gj(d), ref(d);
    for_each_index(ext, [&](std::span<const std::size_t> s) {
      std::size_t qflat = 0;
      std::vector<std::size_t> q(d);
      double vi = 1.0;
      for (int k = 0; k < d; ++k) {
        q[k] = support[bi[k]][s[k]].first;
        qflat = qflat * nq + q[k];
      }
      for (int k = 0; k < d; ++k) {
        const int jl = support[bi[k]][s[k]].second;
        vi *= table.value(q[k], 0, jl);
        double dv = 1.0;
        for (int m = 0; m < d; ++m)
          dv *= table.value(q[m], m == k ? 1 : 0, support[bi[m]][s[m]].second);
        ref(k) = dv;
      }
      gi = jinv_t[qflat] * ref;
      const double w = wdet[qflat];
      for_each_index(local, [&](std::span<const std::size_t> jloc) {
        std::size_t col = 0;
        double vj = 1.0;
        for (int k = 0; k < d; ++k) {
          col = col * n1 + table.first(q[k]) + jloc[k];
          vj *= table.value(q[k], 0, static_cast<int>(jloc[k]));
          double dv = 1.0;
          for (int m = 0; m < d; ++m) dv *= table.value(q[m], m == k ? 1 : 0, static_cast<int>(jloc[m]));
          ref(k) = dv;
        }
        gj = jinv_t[qflat] * ref;
        g.mass(row, static_cast<Eigen::Index>(col)) += w * vi * vj;
        g.stiffness(row, static_cast<Eigen::Index>(col)) += w * gi.dot(gj);
      });
    });
  };

  const std::int64_t rows = static_cast<std::int64_t>(total_b);
  if (exec == Execution::Serial) {
    for (std::int64_t r = 0; r < rows; ++r) assemble_row(r);
  } else {
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t r = 0; r < rows; ++r) assemble_row(r);
  }
  return g;
}

}  // namespace sgspline
