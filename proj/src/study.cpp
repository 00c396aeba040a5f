#include "sgspline/study.hpp"

#include "sgspline/error.hpp"
#include "sgspline/geometry.hpp"
#include "sgspline/inverse.hpp"
#include "sgspline/quad_project.hpp"
#include "sgspline/sg_spaces.hpp"
#include "sgspline/sparse_index.hpp"
#include "sgspline/targets.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace sgspline {

namespace {

struct KindInfo {
  StudyKind kind;
  const char* name;
  const char* description;
};

constexpr KindInfo kKinds[] = {
    {StudyKind::UnivariateConvergence, "univariate-convergence",
     "L2/H^r projection error of sin(2 pi x) per level, with the best-approximation bound"},
    {StudyKind::SparseConvergence, "sparse-convergence",
     "combination-technique L2 error on (0,1)^d with log-corrected rate fit"},
    {StudyKind::MappedConvergence, "mapped-convergence",
     "combination-technique L2 error on a B-spline-mapped domain"},
    {StudyKind::Equivalence, "equivalence",
     "combination vs hierarchical space: dimensions and cross residuals"},
    {StudyKind::Identities, "identities",
     "exact combinatorial identities, cancellation and telescopic identities"},
    {StudyKind::InverseInequality, "inverse-inequality",
     "largest Rayleigh quotients on q-vanishing univariate, sparse and mapped spaces"},
    {StudyKind::Dimensions, "dimensions", "sparse and full tensor dimensions"},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool is_known_key(const std::string& k) {
  const auto& keys = known_config_keys();
  return std::find(keys.begin(), keys.end(), k) != keys.end();
}

double log_h(int n) { return n * std::log(2.0); }  // |log h_n|

}  // namespace

std::string to_string(StudyKind kind) {
  for (const auto& k : kKinds)
    if (k.kind == kind) return k.name;
  return "unknown";
}

StudyKind parse_study_kind(const std::string& name) {
  for (const auto& k : kKinds)
    if (name == k.name) return k.kind;
  throw ConfigError("unknown study kind '" + name + "' (see `study list-kinds`)");
}

std::vector<StudyKind> all_study_kinds() {
  std::vector<StudyKind> out;
  for (const auto& k : kKinds) out.push_back(k.kind);
  return out;
}

std::string describe(StudyKind kind) {
  for (const auto& k : kKinds)
    if (k.kind == kind) return k.description;
  return "";
}

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = {
      "kind",  "d",        "p",        "q",     "r",        "n_min",         "n_max",
      "target", "geometry", "geometry_file", "seed", "draws", "d_max", "brute_max",
      "scope", "record_timing", "out"};
  return keys;
}

StudyConfig StudyConfig::parse(std::istream& in, const std::string& origin) {
  StudyConfig cfg;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    const std::string where = origin + ":" + std::to_string(line);
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
    if (!is_known_key(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    if (value.empty()) throw ConfigError(where + ": key '" + key + "' has no value");
    if (cfg.values_.count(key)) throw ConfigError(where + ": key '" + key + "' given twice");
    cfg.values_[key] = value;
  }
  if (!cfg.has("kind")) throw ConfigError(origin + ": missing required key 'kind'");
  parse_study_kind(cfg.values_.at("kind"));
  return cfg;
}

StudyConfig StudyConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in, path);
}

void StudyConfig::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + assignment + "'");
  const std::string key = trim(assignment.substr(0, eq)), value = trim(assignment.substr(eq + 1));
  if (!is_known_key(key)) throw ConfigError("--set: unknown key '" + key + "'");
  if (value.empty()) throw ConfigError("--set: key '" + key + "' has no value");
  if (key == "kind") parse_study_kind(value);
  values_[key] = value;
}

StudyKind StudyConfig::kind() const { return parse_study_kind(get("kind", "")); }

std::string StudyConfig::get(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

int StudyConfig::get_int(const std::string& key, int fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = values_.at(key);
  try {
    std::size_t used = 0;
    const int x = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
  }
}

bool StudyConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = values_.at(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "': expected true or false, got '" + v + "'");
}

std::vector<int> StudyConfig::get_int_list(const std::string& key, std::vector<int> fallback) const {
  if (!has(key)) return fallback;
  std::vector<int> out;
  std::stringstream ss(values_.at(key));
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(tok, &used));
      if (used != tok.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': bad list entry '" + tok + "'");
    }
  }
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

std::string StudyConfig::template_text(StudyKind kind) {
  std::ostringstream o;
  o << "# " << describe(kind) << "\n";
  o << "kind = " << to_string(kind) << "\n";
  switch (kind) {
    case StudyKind::UnivariateConvergence:
      o << "p = 1,2,3\nr = 0\nn_min = 3\nn_max = 7\ntarget = sin2pi\n";
      break;
    case StudyKind::SparseConvergence:
      o << "d = 2\np = 1,2\nn_min = 3\nn_max = 8\ntarget = sinpi\n";
      break;
    case StudyKind::MappedConvergence:
      o << "d = 2\np = 2\nn_min = 3\nn_max = 7\ntarget = sinpi_exp\ngeometry = distorted\n"
        << "# geometry_file = my_map.geo\n";
      break;
    case StudyKind::Equivalence:
      o << "d = 2\np = 1,2\nn_min = 2\nn_max = 5\n";
      break;
    case StudyKind::Identities:
      o << "d_max = 6\nn_max = 12\np = 1,2,3,4\ndraws = 100\nseed = 1\n";
      break;
    case StudyKind::InverseInequality:
      o << "d = 2\np = 2,3\nq = 1,2\nn_min = 3\nn_max = 5\nscope = all\ngeometry = distorted\n";
      break;
    case StudyKind::Dimensions:
      o << "d = 2\np = 1\nn_min = 3\nn_max = 10\nbrute_max = 5\n";
      break;
  }
  o << "# record_timing = false\n# out = results.csv\n";
  return o.str();
}

bool StudyReport::all_pass() const { return failures() == 0; }

std::size_t StudyReport::failures() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const StudyRow& r) {
    return r.pass.has_value() && !*r.pass;
  }));
}

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : ""; }

std::string pass_str(const std::optional<bool>& p) { return p ? (*p ? "pass" : "fail") : ""; }

}  // namespace

void StudyReport::write_csv(std::ostream& out) const {
  out << "kind,d,p,n,level,r,q,value,bound,ratio,pass,source,seconds\n";
  for (const auto& r : rows) {
    out << r.kind << ',' << r.d << ',' << r.p << ',' << r.n << ',' << r.level << ',' << r.r << ','
        << r.q << ',' << num(r.value) << ',' << opt_num(r.bound) << ',' << opt_num(r.ratio) << ','
        << pass_str(r.pass) << ',' << r.source << ',' << num(r.seconds) << '\n';
  }
}

void StudyReport::write_summary(std::ostream& out) const {
  out << to_string(kind) << ": " << rows.size() << " rows, " << failures() << " failed\n";
  for (const auto& r : rows) {
    if (!r.pass.has_value()) continue;
    out << "  [" << pass_str(r.pass) << "] " << r.source << " d=" << r.d << " p=" << r.p
        << " n=" << r.n << " " << r.level << " value=" << num(r.value);
    if (r.bound) out << " bound=" << num(*r.bound);
    out << "\n";
  }
}

double fit_rate(const std::vector<std::pair<double, double>>& pairs, int log_power) {
  if (pairs.size() < 3) throw std::invalid_argument("fit_rate: need at least 3 (h, error) pairs");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!(pairs[i].second > 0)) throw std::invalid_argument("fit_rate: errors must be positive");
    if (!(pairs[i].first > 0 && pairs[i].first < 1))
      throw std::invalid_argument("fit_rate: h must lie in (0,1)");
    if (i > 0 && !(pairs[i].first < pairs[i - 1].first))
      throw std::invalid_argument("fit_rate: h must be strictly decreasing");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(pairs.size());
  for (const auto& [h, e] : pairs) {
    const double x = std::log(h);
    const double y = std::log(e) - log_power * std::log(std::abs(std::log(h)));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

namespace {

class Runner {
 public:
  explicit Runner(const StudyConfig& cfg) : cfg_(cfg), timing_(cfg.get_bool("record_timing", false)) {}

  StudyReport run() {
    report_.kind = cfg_.kind();
    switch (report_.kind) {
      case StudyKind::UnivariateConvergence: univariate(); break;
      case StudyKind::SparseConvergence: sparse(); break;
      case StudyKind::MappedConvergence: mapped(); break;
      case StudyKind::Equivalence: equivalence(); break;
      case StudyKind::Identities: identities(); break;
      case StudyKind::InverseInequality: inverse(); break;
      case StudyKind::Dimensions: dimensions(); break;
    }
    return std::move(report_);
  }

 private:
  using Clock = std::chrono::steady_clock;

  StudyRow row(int d, int p, int n, std::string level, std::string source) const {
    StudyRow r;
    r.kind = to_string(report_.kind);
    r.d = d;
    r.p = p;
    r.n = n;
    r.level = std::move(level);
    r.source = std::move(source);
    return r;
  }

  void push(StudyRow r, Clock::time_point start) {
    if (timing_) r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    report_.rows.push_back(std::move(r));
  }

  std::pair<int, int> n_range(int lo_default, int hi_default, int minimum) const {
    const int lo = cfg_.get_int("n_min", lo_default), hi = cfg_.get_int("n_max", hi_default);
    if (lo > hi) throw ConfigError("n_min must not exceed n_max");
    if (lo < minimum)
      throw ConfigError("n_min = " + std::to_string(lo) + " is below the minimum level " +
                        std::to_string(minimum));
    if (hi > 20) throw ConfigError("n_max too large");
    return {lo, hi};
  }

  std::vector<int> degrees(std::vector<int> fallback) const {
    auto ps = cfg_.get_int_list("p", std::move(fallback));
    for (int p : ps)
      if (p < 0 || p > 8) throw ConfigError("degree p = " + std::to_string(p) + " out of range [0,8]");
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    return ps;
  }

  int dimension(int fallback, int lo, int hi) const {
    const int d = cfg_.get_int("d", fallback);
    if (d < lo || d > hi)
      throw ConfigError("d = " + std::to_string(d) + " out of range [" + std::to_string(lo) + "," +
                        std::to_string(hi) + "]");
    return d;
  }

  std::unique_ptr<Target> target(const std::string& fallback, int d) const {
    try {
      return make_builtin_target(cfg_.get("target", fallback), d);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }

  GeometryMap geometry() const {
    if (cfg_.has("geometry_file")) {
      try {
        return GeometryMap::from_file(cfg_.get("geometry_file", ""));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      } catch (const NumericalError& e) {
        throw ConfigError(e.what());
      } catch (const std::runtime_error& e) {
        throw ConfigError(e.what());
      }
    }
    try {
      return GeometryMap::builtin(cfg_.get("geometry", "distorted"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }

  void fit_row(int d, int p, const std::vector<std::pair<double, double>>& pairs, int log_power,
               double expected, double tolerance, bool two_sided, const std::string& source,
               int r = 0, bool checked = true) {
    if (pairs.size() < 3) return;
    StudyRow fr = row(d, p, 0, log_power ? "fit_log" + std::to_string(log_power) : "fit", source);
    fr.r = r;
    fr.q = p + 1;
    fr.value = fit_rate(pairs, log_power);
    fr.bound = expected;
    fr.ratio = fr.value / expected;
    if (checked)
      fr.pass = two_sided ? std::abs(fr.value - expected) <= tolerance : fr.value >= expected - tolerance;
    report_.rows.push_back(std::move(fr));
  }

  void univariate() {
    const int r = cfg_.get_int("r", 0);
    const auto ps = degrees({1, 2, 3});
    for (int p : ps)
      if (r < 0 || r > p) throw ConfigError("need 0 <= r <= p for every degree");
    const auto [lo, hi] = n_range(3, 7, 1);
    const auto f = target("sin2pi", 1);
    for (int p : ps) {
      const int q = p + 1;
      const double semi = target_norm(*f, NormKind::Seminorm, q, CompositeRule(8, 8));
      std::vector<std::pair<double, double>> pairs;
      for (int l = lo; l <= hi; ++l) {
        const auto t0 = Clock::now();
        const SplineSpace1D space = make_space(p, l);
        CoefficientTensor u(p, {l});
        const auto c = project_1d(space, *f, r);
        std::copy(c.begin(), c.end(), u.coefficients.data().begin());
        const double err = error_norm(*f, u, NormKind::Seminorm, r);
        StudyRow rw = row(1, p, l, std::to_string(l), "projection_bound");
        rw.r = r;
        rw.q = q;
        rw.value = err;
        if (space.h() * p < 1.0) {
          rw.bound = constants::c1(q, r) * std::pow(space.h(), q - r) * semi;
          rw.ratio = err / *rw.bound;
          rw.pass = err <= *rw.bound;
        }
        pairs.push_back({space.h(), err});
        push(std::move(rw), t0);
      }
      fit_row(1, p, pairs, 0, q - r, 0.1, true, "projection_bound", r);
    }
  }

  void sparse() {
    const int d = dimension(2, 1, 4);
    if (cfg_.get_int("r", 0) != 0) throw ConfigError("sparse-convergence supports r = 0 only");
    const auto ps = degrees({1, 2});
    const auto f = target("sinpi", d);
    for (int p : ps) {
      const auto [lo, hi] = n_range(3, 8, lambda_eff(p));
      const int q = p + 1;
      const double mixed = target_norm(*f, NormKind::MixedNorm, q, CompositeRule(6, 8));
      std::vector<std::pair<double, double>> pairs;
      for (int n = lo; n <= hi; ++n) {
        const auto t0 = Clock::now();
        const LevelRule rule = LevelRule::make(d, n, p);
        const SparseGridFunction u = combination_project(*f, rule);
        const double err = error_norm(*f, u, NormKind::Norm, 0);
        const double h = std::ldexp(1.0, -n);
        StudyRow rw = row(d, p, n, std::to_string(n), "sparse_rate");
        rw.q = q;
        rw.value = err;
        if (d == 2) {
          rw.bound = constants::c10(d, q, 0) * std::pow(h, q) * std::pow(log_h(n), d - 1) * mixed;
          rw.ratio = err / *rw.bound;
          rw.pass = err <= *rw.bound;
        }
        pairs.push_back({h, err});
        push(std::move(rw), t0);
      }
      fit_row(d, p, pairs, 0, q, 0.15, false, "sparse_rate", 0, false);
      fit_row(d, p, pairs, d - 1, q, 0.15, false, "sparse_rate");
    }
  }

  void mapped() {
    const GeometryMap map = geometry();
    const int d = map.dim();
    if (cfg_.has("d") && cfg_.get_int("d", d) != d) throw ConfigError("d does not match the geometry");
    if (cfg_.get_int("r", 0) != 0) throw ConfigError("mapped-convergence supports r = 0 only");
    const auto ps = degrees({2});
    const auto f = target("sinpi_exp", d);
    const PulledBackTarget pulled(*f, map);
    for (int p : ps) {
      const auto [lo, hi] = n_range(3, 7, lambda_eff(p));
      std::vector<std::pair<double, double>> pairs;
      for (int n = lo; n <= hi; ++n) {
        const auto t0 = Clock::now();
        const SparseGridFunction u = combination_project(pulled, LevelRule::make(d, n, p));
        const double err = pullback_error_norm(*f, u, map, NormKind::Norm, 0);
        StudyRow rw = row(d, p, n, std::to_string(n), "mapped_rate");
        rw.q = p + 1;
        rw.value = err;
        pairs.push_back({std::ldexp(1.0, -n), err});
        push(std::move(rw), t0);
      }
      fit_row(d, p, pairs, 0, p + 1, 0.2, false, "mapped_rate", 0, false);
      fit_row(d, p, pairs, d - 1, p + 1, 0.2, false, "mapped_rate");
    }
  }

  void equivalence() {
    const int d = dimension(2, 1, 3);
    for (int p : degrees({1, 2})) {
      const auto [lo, hi] = n_range(2, 5, lambda_eff(p));
      for (int n = lo; n <= hi; ++n) {
        const auto t0 = Clock::now();
        const EquivalenceReport rep = equivalence_report(LevelRule::make(d, n, p));
        StudyRow dims = row(d, p, n, "dims", "equivalence");
        dims.value = rep.dim_combination;
        dims.bound = rep.dim_hierarchical;
        dims.ratio = dims.value / *dims.bound;
        dims.pass = rep.dim_combination == rep.dim_hierarchical &&
                    rep.rank_hierarchical == rep.dim_hierarchical &&
                    rep.dim_formula == rep.dim_hierarchical;
        StudyRow res = row(d, p, n, "residual", "equivalence");
        res.value = rep.cross_residual_max;
        res.bound = 1e-9;
        res.pass = rep.cross_residual_max < 1e-9;
        push(std::move(dims), t0);
        push(std::move(res), t0);
      }
    }
  }

  void identities() {
    const int d_max = cfg_.get_int("d_max", 6), n_max = cfg_.get_int("n_max", 12);
    if (d_max < 2 || d_max > 8) throw ConfigError("d_max out of range [2,8]");
    if (n_max < 1 || n_max > 16) throw ConfigError("n_max out of range [1,16]");
    const auto ps = degrees({1, 2, 3, 4});
    const int draws = cfg_.get_int("draws", 100);
    const auto seed = static_cast<std::uint64_t>(cfg_.get_int("seed", 1));

    for (int d = 2; d <= std::max(d_max, 8); ++d) {
      const auto t0 = Clock::now();
      StudyRow rw = row(d, 0, 0, "all_i", "power_sums");
      rw.value = alternating_power_sums_vanish(d) ? 0 : 1;
      rw.pass = rw.value == 0;
      push(std::move(rw), t0);
    }
    for (int d = 1; d <= d_max; ++d) {
      for (int p : ps) {
        const int lambda = lambda_eff(p);
        auto t0 = Clock::now();
        long mismatches = 0;
        for (int n = 1; n <= n_max; ++n)
          for (int ell = 0; ell <= n; ++ell)
            for (int k = 0; k <= d - 1; ++k)
              if (layered_binomial_sum(d, n, p, ell, k) != (k == 0 ? 1 : 0)) ++mismatches;
        StudyRow l3 = row(d, p, n_max, "all", "layered_sums");
        l3.value = static_cast<double>(mismatches);
        l3.pass = mismatches == 0;
        push(std::move(l3), t0);

        t0 = Clock::now();
        mismatches = 0;
        for (int n = lambda; n <= n_max; ++n) {
          const LevelRule rule = LevelRule::make(d, n, p);
          const CombinationSet set(rule);
          if (set.coefficient_sum() != 1) ++mismatches;
          for (int l = 0; l < d; ++l)
            if (BigInt(set.layer(l).size()) != binomial(n + d - 1 - lambda - l, d - 1)) ++mismatches;
          if (BigInt(HierSet(rule).size()) != binomial(n - lambda + d, d)) ++mismatches;
        }
        StudyRow l4 = row(d, p, n_max, "all", "coefficient_sums");
        l4.value = static_cast<double>(mismatches);
        l4.pass = mismatches == 0;
        push(std::move(l4), t0);
      }
    }
    for (int d = 2; d <= std::min(3, d_max); ++d) {
      const auto t0 = Clock::now();
      double worst = 0.0;
      for (int draw = 0; draw < draws; ++draw) {
        const int n = 1 + draw % std::min(6, n_max);
        const auto res = cancellation_residual(LevelRule::make(d, n, 1),
                                               random_abstract_values(seed * 1000003ULL + draw));
        worst = std::max(worst, res.relative());
      }
      StudyRow rw = row(d, 1, std::min(6, n_max), "random", "cancellation");
      rw.value = worst;
      rw.bound = 1e-10;
      rw.pass = worst < 1e-10;
      push(std::move(rw), t0);
    }
    {
      const auto t0 = Clock::now();
      const auto f = make_builtin_target("sinpi_exp", 2);
      StudyRow rw = row(2, 2, 0, "3-2", "telescopic");
      rw.value = telescopic_residual(*f, 2, {3, 2});
      rw.bound = 1e-10;
      rw.pass = rw.value < 1e-10;
      push(std::move(rw), t0);
    }
    if (d_max >= 3) {
      const auto t0 = Clock::now();
      const RidgeTarget f({1, 1, 1}, {1.0, 1.0, 1.0}, 0.0, RidgeTarget::Profile::Sine, "xyz_sin");
      StudyRow rw = row(3, 1, 0, "2-2-2", "telescopic");
      rw.value = telescopic_residual(f, 1, {2, 2, 2});
      rw.bound = 1e-9;
      rw.pass = rw.value < 1e-9;
      push(std::move(rw), t0);
    }
  }

  void inverse() {
    const int d = dimension(2, 1, 3);
    const auto ps = degrees({2, 3});
    const auto qs = cfg_.get_int_list("q", {1, 2});
    const std::string scope = cfg_.get("scope", "all");
    if (scope != "all" && scope != "univariate" && scope != "sparse" && scope != "mapped")
      throw ConfigError("scope must be all, univariate, sparse or mapped");
    for (int p : ps)
      for (int q : qs)
        if (q < 1 || q > p) throw ConfigError("need 1 <= q <= p for every (p, q)");
    const bool uni = scope == "all" || scope == "univariate";
    const bool sp = (scope == "all" || scope == "sparse") && d >= 2;
    const bool mp = (scope == "all" || scope == "mapped") && d >= 2;

    for (int p : ps) {
      const auto [lo, hi] = n_range(3, 5, lambda_eff(p));
      for (int q : qs) {
        if (uni)
          for (int l = lo; l <= hi + 1; ++l) {
            const auto t0 = Clock::now();
            StudyRow rw = row(1, p, l, std::to_string(l), "inverse_1d");
            rw.q = q;
            rw.value = univariate_inverse_ratio(p, q, l);
            rw.bound = constants::c2(q) * std::pow(2.0, q * l);
            rw.ratio = rw.value / *rw.bound;
            rw.pass = rw.value <= *rw.bound;
            push(std::move(rw), t0);
          }
        if (sp)
          for (int n = lo; n <= hi; ++n) {
            const auto t0 = Clock::now();
            StudyRow rw = row(d, p, n, std::to_string(n), "inverse_sparse");
            rw.q = q;
            rw.value = sparse_inverse_ratio(LevelRule::make(d, n, p), q);
            rw.bound = constants::c11(d, q) * std::pow(2.0, q * n) * std::pow(log_h(n), d / 2.0);
            rw.ratio = rw.value / *rw.bound;
            rw.pass = rw.value <= *rw.bound;
            push(std::move(rw), t0);
          }
      }
      if (mp) mapped_inverse(d, p, lo, hi);
    }
  }

  // One constant fitted at the coarsest level; later levels may exceed it by 5%.
  void mapped_inverse(int d, int p, int lo, int hi) {
    const GeometryMap map = geometry();
    if (map.dim() != d) throw ConfigError("geometry dimension does not match d");
    double c = 0.0;
    for (int n = lo; n <= hi; ++n) {
      const auto t0 = Clock::now();
      const double growth = std::pow(2.0, n) * std::pow(log_h(n), d / 2.0);
      StudyRow rw = row(d, p, n, std::to_string(n), "inverse_mapped");
      rw.q = 1;
      rw.value = mapped_inverse_ratio(LevelRule::make(d, n, p), 1, map);
      if (n == lo) c = rw.value / growth;
      rw.bound = 1.05 * c * growth;
      rw.ratio = rw.value / growth;
      rw.pass = rw.value <= *rw.bound;
      push(std::move(rw), t0);
    }
  }

  void dimensions() {
    const int d = dimension(2, 1, 6);
    const int brute_max = cfg_.get_int("brute_max", 5);
    for (int p : degrees({1})) {
      const auto [lo, hi] = n_range(3, 10, lambda_eff(p));
      double qmin = 0, qmax = 0;
      for (int n = lo; n <= hi; ++n) {
        const auto t0 = Clock::now();
        const LevelRule rule = LevelRule::make(d, n, p);
        const DimensionCount dc = sparse_dimension(rule);
        StudyRow rw = row(d, p, n, std::to_string(n), "dimension");
        rw.value = static_cast<double>(dc.sparse);
        rw.bound = static_cast<double>(dc.full);
        rw.ratio = rw.value / *rw.bound;
        if (d == 2 && n <= brute_max) {
          const EquivalenceReport rep = equivalence_report(rule);
          rw.pass = rep.dim_combination == static_cast<int>(dc.sparse);
        }
        const double quotient = rw.value / (std::ldexp(1.0, n) * std::pow(n, d - 1));
        qmin = n == lo ? quotient : std::min(qmin, quotient);
        qmax = n == lo ? quotient : std::max(qmax, quotient);
        const double share = *rw.ratio;
        push(std::move(rw), t0);
        if (d == 2 && n == 10) {
          StudyRow sr = row(d, p, n, "share", "dimension");
          sr.value = share;
          sr.bound = 0.02;
          sr.pass = share < 0.02;
          report_.rows.push_back(std::move(sr));
        }
      }
      StudyRow fit = row(d, p, hi, "growth", "dimension");
      fit.value = qmax / qmin;
      fit.bound = 2.0;
      fit.pass = fit.value <= 2.0;
      report_.rows.push_back(std::move(fit));
    }
  }

  const StudyConfig& cfg_;
  bool timing_;
  StudyReport report_;
};

}  // namespace

StudyReport run_study(const StudyConfig& cfg) {
  try {
    return Runner(cfg).run();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace sgspline
