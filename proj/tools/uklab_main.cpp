// Experiment runner: builds discretized singular measures on the torus,
// fits their Fourier/ball-condition decay, computes Gowers box norms, and
// machine-checks the maximal-operator inequality suite.
//
// Exit codes: 0 all checks passed, 1 a check failed, 2 bad configuration.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "uklab/config.hpp"
#include "uklab/io.hpp"
#include "uklab/parallel.hpp"
#include "uklab/suite.hpp"

namespace {

uklab::ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) return uklab::ExperimentConfig{};
  std::ifstream in(path);
  if (!in) throw uklab::ConfigError({"config file not readable: " + path});
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw uklab::ConfigError({std::string("config is not valid JSON: ") + e.what()});
  }
  return uklab::ExperimentConfig::from_json(j);
}

void print_summary(const std::string& name, const uklab::SuiteOutcome& out) {
  std::cout << name << ": " << (out.pass ? "PASS" : "FAIL") << "\n";
  std::cout << out.summary.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uklab: Gowers-norm and maximal-operator laboratory for singular measures"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  uint64_t seed = 0;
  bool seed_set = false;
  int threads = -1;
  bool exact = false;

  const std::vector<std::pair<std::string, std::string>> names = {
      {"build-measure", "construct the configured measure and fit its ball condition"},
      {"fourier-fit", "spectrum and classical/higher-order decay fits"},
      {"gowers-norms", "U^k norms of the mollified measure"},
      {"prop1", "Gowers-norm decay of the mollification bands"},
      {"maximal-7p8", "restricted strong-type split into tangency and transverse pieces"},
      {"verify-lemmas", "inequality suites: transverse, tangency, scale lemmas"},
      {"full-suite", "all of the above plus a report record"}};
  for (const auto& [n, desc] : names) {
    CLI::App* sub = app.add_subcommand(n, desc);
    sub->add_option("--config", config_path, "JSON experiment config");
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--seed", seed, "master seed (overrides config)")
        ->each([&](const std::string&) { seed_set = true; });
    sub->add_option("--threads", threads, "worker threads (0 = library default)");
    sub->add_flag("--exact", exact, "enable exact enumeration oracles where available");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    uklab::ExperimentConfig cfg = load_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed_set) cfg.master_seed = seed;
    if (threads >= 0) cfg.threads = threads;
    if (exact) cfg.exact = true;
    if (auto problems = cfg.validate(); !problems.empty())
      throw uklab::ConfigError(std::move(problems));
    uklab::set_threads(cfg.threads);

    const std::string sub = app.get_subcommands().front()->get_name();
    uklab::SuiteOutcome out;
    if (sub == "build-measure")
      out = uklab::run_build_measure(cfg, cfg.out_dir);
    else if (sub == "fourier-fit")
      out = uklab::run_fourier_fit(cfg, cfg.out_dir);
    else if (sub == "gowers-norms")
      out = uklab::run_gowers_norms(cfg, cfg.out_dir);
    else if (sub == "prop1")
      out = uklab::run_prop1(cfg, cfg.out_dir);
    else if (sub == "maximal-7p8")
      out = uklab::run_maximal_7p8(cfg, cfg.out_dir);
    else if (sub == "verify-lemmas")
      out = uklab::run_verify_lemmas(cfg, cfg.out_dir);
    else
      out = uklab::run_full_suite(cfg, cfg.out_dir);

    print_summary(sub, out);
    return out.pass ? 0 : 1;
  } catch (const uklab::ConfigError& e) {
    std::cerr << "config error:\n";
    for (const auto& f : e.bad_fields) std::cerr << "  - " << f << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
