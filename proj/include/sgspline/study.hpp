#pragma once

// Configuration-driven convergence, identity, dimension and inverse-inequality studies.

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sgspline {

/// Bad configuration: unknown key, malformed value, incompatible parameters.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class StudyKind {
  UnivariateConvergence,
  SparseConvergence,
  MappedConvergence,
  Equivalence,
  Identities,
  InverseInequality,
  Dimensions,
};

std::string to_string(StudyKind kind);
StudyKind parse_study_kind(const std::string& name);
std::vector<StudyKind> all_study_kinds();
std::string describe(StudyKind kind);

/// Flat key = value configuration.
class StudyConfig {
 public:
  static StudyConfig parse(std::istream& in, const std::string& origin = "<config>");
  static StudyConfig from_file(const std::string& path);
  /// Default configuration text for a kind, as printed by `study gen-config`.
  static std::string template_text(StudyKind kind);

  /// "key=value" override; the key must be known.
  void set(const std::string& assignment);

  StudyKind kind() const;
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Comma-separated integers.
  std::vector<int> get_int_list(const std::string& key, std::vector<int> fallback) const;
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Keys accepted in configuration files and overrides.
const std::vector<std::string>& known_config_keys();

struct StudyRow {
  std::string kind;
  int d = 0;
  int p = 0;
  int n = 0;
  std::string level;  // level multi-index, or a label for aggregate rows
  int r = 0;
  int q = 0;
  double value = 0.0;
  std::optional<double> bound;
  std::optional<double> ratio;
  std::optional<bool> pass;
  std::string source;
  double seconds = 0.0;
};

struct StudyReport {
  StudyKind kind{};
  std::vector<StudyRow> rows;

  bool all_pass() const;
  std::size_t failures() const;
  void write_csv(std::ostream& out) const;
  void write_summary(std::ostream& out) const;
};

StudyReport run_study(const StudyConfig& cfg);

/// Least-squares slope of log(error / |log h|^log_power) against log h. Needs at least three
/// pairs with strictly decreasing h and positive errors.
double fit_rate(const std::vector<std::pair<double, double>>& pairs, int log_power = 0);

}  // namespace sgspline
