#include "sgspline/error.hpp"
#include "sgspline/study.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

void apply_thread_cap() {
  const char* env = std::getenv("STUDY_THREADS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) throw sgspline::ConfigError("STUDY_THREADS must be a positive integer");
  omp_set_num_threads(static_cast<int>(n));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse-grid B-spline study runner"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  std::vector<std::string> overrides;
  auto* run = app.add_subcommand("run", "run a study described by a config file");
  run->add_option("config", config_path, "config file (key = value lines)")->required();
  run->add_option("--set", overrides, "override a config key, key=value (repeatable)");
  run->add_option("--out", out_path, "CSV output path");

  auto* list = app.add_subcommand("list-kinds", "list the available study kinds");

  std::string kind_name;
  auto* gen = app.add_subcommand("gen-config", "print a default config for a study kind");
  gen->add_option("kind", kind_name, "study kind")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (list->parsed()) {
      for (auto k : sgspline::all_study_kinds())
        std::cout << sgspline::to_string(k) << "\t" << sgspline::describe(k) << "\n";
      return kPass;
    }
    if (gen->parsed()) {
      std::cout << sgspline::StudyConfig::template_text(sgspline::parse_study_kind(kind_name));
      return kPass;
    }

    apply_thread_cap();
    auto cfg = sgspline::StudyConfig::from_file(config_path);
    for (const auto& o : overrides) cfg.set(o);
    if (out_path.empty()) out_path = cfg.get("out", "study_" + cfg.get("kind", "") + ".csv");

    const sgspline::StudyReport report = sgspline::run_study(cfg);
    std::ofstream csv(out_path);
    if (!csv) throw sgspline::ConfigError("cannot write '" + out_path + "'");
    report.write_csv(csv);
    report.write_summary(std::cout);
    std::cout << "csv: " << out_path << "\n";
    return report.all_pass() ? kPass : kFail;
  } catch (const sgspline::ConfigError& e) {
    std::cerr << "study: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "study: error: " << e.what() << "\n";
    return kFail;
  }
}
