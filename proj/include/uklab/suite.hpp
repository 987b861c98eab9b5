#ifndef UKLAB_SUITE_HPP
#define UKLAB_SUITE_HPP

#include <string>

#include <json.hpp>

#include "uklab/config.hpp"
#include "uklab/grid.hpp"

namespace uklab {

/// Result of one CLI experiment: overall pass flag plus the JSON summary
/// that was written to disk.
struct SuiteOutcome {
  bool pass = true;
  nlohmann::json summary;
};

GridFunction random_function(const TorusGrid& g, uint64_t seed, double lo, double hi);

SuiteOutcome run_build_measure(const ExperimentConfig& cfg, const std::string& out_dir);
SuiteOutcome run_fourier_fit(const ExperimentConfig& cfg, const std::string& out_dir);
SuiteOutcome run_gowers_norms(const ExperimentConfig& cfg, const std::string& out_dir);
SuiteOutcome run_prop1(const ExperimentConfig& cfg, const std::string& out_dir);
SuiteOutcome run_maximal_7p8(const ExperimentConfig& cfg, const std::string& out_dir);
SuiteOutcome run_verify_lemmas(const ExperimentConfig& cfg, const std::string& out_dir);
SuiteOutcome run_full_suite(const ExperimentConfig& cfg, const std::string& out_dir);

}  // namespace uklab

#endif  // UKLAB_SUITE_HPP
