#ifndef UKLAB_CONFIG_HPP
#define UKLAB_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "uklab/common.hpp"
#include "uklab/grid.hpp"
#include "uklab/maximal.hpp"

namespace uklab {

inline constexpr const char* kToolVersion = "uklab 0.1.0";

/// Thrown by config validation; carries every offending field.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> fields)
      : std::runtime_error("invalid config: " + join(fields)), bad_fields(std::move(fields)) {}
  std::vector<std::string> bad_fields;

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "; " : "") + v[i];
    return s;
  }
};

/// Declarative experiment inputs.  The JSON schema mirrors the fields;
/// unknown keys are rejected so typos fail loudly.
struct ExperimentConfig {
  // measure
  std::string measure_family = "salem";  // lebesgue | cantor | salem | dirac
  double cantor_ratio = 1.0 / 3.0;
  int cantor_depth = 5;
  int salem_keep = 2;
  int salem_split = 4;
  int salem_depth = 6;
  uint64_t measure_seed = 7;

  // grid
  int d = 1;
  int64_t n = 256;

  // kernel
  std::string kernel_profile = "bump";  // bump | gauss

  // scales and orders
  int n_lo = 2;
  int n_hi = 5;
  int dyadic_s = 3;
  int order_k = 2;
  int order_j = 1;

  // fits
  double fit_window_lo = 1.0;
  double fit_window_hi = 0.0;  // 0: choose from grid/scale
  double fit_quantile = 1.0;

  // slacks for the trend checks (the rate bounds carry unspecified constants)
  double prop1_slack = 0.25;
  double prop1_flat_guard = 0.15;
  double d11_slack = 0.3;

  // Monte Carlo
  int64_t mc_samples = 1 << 16;
  int64_t tangency_samples = 1 << 20;

  // scale selector
  std::string t_kind = "random";  // constant | random | sawtooth
  double t_value = 1.5;

  // omega
  std::string omega_family = "dyadic";  // full | interval | dyadic | cantor
  double omega_volume = 0.25;
  int omega_block_level = 3;

  double eps = 0.6;

  std::string out_dir = "out";
  uint64_t master_seed = 1;
  int threads = 0;  // 0: library default
  bool exact = false;

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);  // validates

  /// Collected validation problems (empty when the config is usable).
  std::vector<std::string> validate() const;

  /// FNV-1a over the canonical (sorted-key) dump: stable under field
  /// reordering in the source file.
  uint64_t hash() const;

  GridMeasure build_measure() const;
  MollifierFamily mollifier() const;
  ScaleFunction build_scale_function(const TorusGrid& g) const;
  OmegaSet build_omega(const TorusGrid& g) const;
  std::string measure_name() const;
  /// Radii matched to the measure's construction base (triadic for the
  /// middle-thirds measure, split-adic for the random one, else dyadic).
  std::vector<double> ball_fit_radii(const TorusGrid& g) const;
};

}  // namespace uklab

#endif  // UKLAB_CONFIG_HPP
