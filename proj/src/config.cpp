#include "uklab/config.hpp"

#include <cmath>
#include <set>

#include "uklab/rng.hpp"

namespace uklab {

using nlohmann::json;

json ExperimentConfig::to_json() const {
  json j;
  j["measure"] = {{"family", measure_family}, {"ratio", cantor_ratio},
                  {"depth", cantor_depth},    {"keep", salem_keep},
                  {"split", salem_split},     {"salem_depth", salem_depth},
                  {"seed", measure_seed}};
  j["grid"] = {{"d", d}, {"n", n}};
  j["kernel"] = {{"profile", kernel_profile}};
  j["scales"] = {{"n_lo", n_lo}, {"n_hi", n_hi}, {"s", dyadic_s}};
  j["orders"] = {{"k", order_k}, {"j", order_j}};
  j["fit"] = {{"window_lo", fit_window_lo}, {"window_hi", fit_window_hi}, {"quantile", fit_quantile}};
  j["slack"] = {{"prop1", prop1_slack}, {"prop1_flat_guard", prop1_flat_guard}, {"d11", d11_slack}};
  j["mc"] = {{"samples", mc_samples}, {"tangency_samples", tangency_samples}};
  j["t"] = {{"kind", t_kind}, {"value", t_value}};
  j["omega"] = {{"family", omega_family}, {"volume", omega_volume}, {"block_level", omega_block_level}};
  j["eps"] = eps;
  j["out_dir"] = out_dir;
  j["master_seed"] = master_seed;
  j["threads"] = threads;
  j["exact"] = exact;
  return j;
}

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known,
                    const std::string& scope, std::vector<std::string>& problems) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      problems.push_back(scope + ": unknown key '" + it.key() + "'");
}

template <class T>
void read_field(const json& j, const char* key, T& out, std::vector<std::string>& problems,
                const std::string& scope) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    problems.push_back(scope + "." + key + ": wrong type");
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  std::vector<std::string> problems;
  reject_unknown(j,
                 {"measure", "grid", "kernel", "scales", "orders", "fit", "slack", "mc", "t",
                  "omega", "eps", "out_dir", "master_seed", "threads", "exact"},
                 "config", problems);
  if (j.contains("measure")) {
    const json& m = j.at("measure");
    reject_unknown(m, {"family", "ratio", "depth", "keep", "split", "salem_depth", "seed"},
                   "measure", problems);
    read_field(m, "family", c.measure_family, problems, "measure");
    read_field(m, "ratio", c.cantor_ratio, problems, "measure");
    read_field(m, "depth", c.cantor_depth, problems, "measure");
    read_field(m, "keep", c.salem_keep, problems, "measure");
    read_field(m, "split", c.salem_split, problems, "measure");
    read_field(m, "salem_depth", c.salem_depth, problems, "measure");
    read_field(m, "seed", c.measure_seed, problems, "measure");
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    reject_unknown(g, {"d", "n"}, "grid", problems);
    read_field(g, "d", c.d, problems, "grid");
    read_field(g, "n", c.n, problems, "grid");
  }
  if (j.contains("kernel")) {
    reject_unknown(j.at("kernel"), {"profile"}, "kernel", problems);
    read_field(j.at("kernel"), "profile", c.kernel_profile, problems, "kernel");
  }
  if (j.contains("scales")) {
    const json& s = j.at("scales");
    reject_unknown(s, {"n_lo", "n_hi", "s"}, "scales", problems);
    read_field(s, "n_lo", c.n_lo, problems, "scales");
    read_field(s, "n_hi", c.n_hi, problems, "scales");
    read_field(s, "s", c.dyadic_s, problems, "scales");
  }
  if (j.contains("orders")) {
    const json& o = j.at("orders");
    reject_unknown(o, {"k", "j"}, "orders", problems);
    read_field(o, "k", c.order_k, problems, "orders");
    read_field(o, "j", c.order_j, problems, "orders");
  }
  if (j.contains("fit")) {
    const json& f = j.at("fit");
    reject_unknown(f, {"window_lo", "window_hi", "quantile"}, "fit", problems);
    read_field(f, "window_lo", c.fit_window_lo, problems, "fit");
    read_field(f, "window_hi", c.fit_window_hi, problems, "fit");
    read_field(f, "quantile", c.fit_quantile, problems, "fit");
  }
  if (j.contains("slack")) {
    const json& s = j.at("slack");
    reject_unknown(s, {"prop1", "prop1_flat_guard", "d11"}, "slack", problems);
    read_field(s, "prop1", c.prop1_slack, problems, "slack");
    read_field(s, "prop1_flat_guard", c.prop1_flat_guard, problems, "slack");
    read_field(s, "d11", c.d11_slack, problems, "slack");
  }
  if (j.contains("mc")) {
    const json& m = j.at("mc");
    reject_unknown(m, {"samples", "tangency_samples"}, "mc", problems);
    read_field(m, "samples", c.mc_samples, problems, "mc");
    read_field(m, "tangency_samples", c.tangency_samples, problems, "mc");
  }
  if (j.contains("t")) {
    const json& t = j.at("t");
    reject_unknown(t, {"kind", "value"}, "t", problems);
    read_field(t, "kind", c.t_kind, problems, "t");
    read_field(t, "value", c.t_value, problems, "t");
  }
  if (j.contains("omega")) {
    const json& o = j.at("omega");
    reject_unknown(o, {"family", "volume", "block_level"}, "omega", problems);
    read_field(o, "family", c.omega_family, problems, "omega");
    read_field(o, "volume", c.omega_volume, problems, "omega");
    read_field(o, "block_level", c.omega_block_level, problems, "omega");
  }
  read_field(j, "eps", c.eps, problems, "config");
  read_field(j, "out_dir", c.out_dir, problems, "config");
  read_field(j, "master_seed", c.master_seed, problems, "config");
  read_field(j, "threads", c.threads, problems, "config");
  read_field(j, "exact", c.exact, problems, "config");

  if (!problems.empty()) throw ConfigError(std::move(problems));
  if (auto v = c.validate(); !v.empty()) throw ConfigError(std::move(v));
  return c;
}

std::vector<std::string> ExperimentConfig::validate() const {
  std::vector<std::string> p;
  if (measure_family != "lebesgue" && measure_family != "cantor" && measure_family != "salem" &&
      measure_family != "dirac")
    p.push_back("measure.family: must be lebesgue|cantor|salem|dirac");
  if (!(cantor_ratio > 0.0 && cantor_ratio < 0.5)) p.push_back("measure.ratio: must be in (0, 1/2)");
  if (cantor_depth < 1 || cantor_depth > 22) p.push_back("measure.depth: must be in 1..22");
  if (salem_keep < 1 || salem_split < 2 || salem_keep >= salem_split)
    p.push_back("measure.keep/split: need 1 <= keep < split");
  if (salem_depth < 1 || salem_depth > 24) p.push_back("measure.salem_depth: must be in 1..24");
  if (d < 1 || d > 4) p.push_back("grid.d: must be in 1..4");
  if (!is_power_of_two(n) || n < 4) p.push_back("grid.n: must be a power of two >= 4");
  if (kernel_profile != "bump" && kernel_profile != "gauss")
    p.push_back("kernel.profile: must be bump|gauss");
  if (n_lo < 0 || n_hi < n_lo) p.push_back("scales.n_lo/n_hi: need 0 <= n_lo <= n_hi");
  if (is_power_of_two(n) && n >= 4 && (int64_t{1} << (n_hi + 2)) > n)
    p.push_back("scales.n_hi: band scale n_hi+1 unresolvable (need 2^(n_hi+2) <= N)");
  if (dyadic_s < 0 || (is_power_of_two(n) && (int64_t{1} << dyadic_s) > n))
    p.push_back("scales.s: dyadic level unresolvable on grid");
  if (order_k < 1 || order_k > 4) p.push_back("orders.k: must be in 1..4");
  if (order_j < 1 || order_j > 3) p.push_back("orders.j: must be in 1..3");
  if ((order_j + 1) * d > 4) p.push_back("orders.j: (j+1)*d exceeds tensor rank 4");
  if (!(fit_window_lo >= 1.0)) p.push_back("fit.window_lo: must be >= 1");
  if (fit_window_hi != 0.0 && fit_window_hi <= fit_window_lo)
    p.push_back("fit.window_hi: must be 0 (auto) or > window_lo");
  if (!(fit_quantile > 0.0 && fit_quantile <= 1.0)) p.push_back("fit.quantile: must be in (0, 1]");
  if (!(prop1_slack >= 0.0)) p.push_back("slack.prop1: must be >= 0");
  if (!(d11_slack >= 0.0)) p.push_back("slack.d11: must be >= 0");
  if (mc_samples < 16) p.push_back("mc.samples: must be >= 16");
  if (tangency_samples < 10000) p.push_back("mc.tangency_samples: must be >= 10^4");
  if (t_kind != "constant" && t_kind != "random" && t_kind != "sawtooth")
    p.push_back("t.kind: must be constant|random|sawtooth");
  if (!(t_value >= 1.0 && t_value <= 2.0)) p.push_back("t.value: must be in [1, 2]");
  if (omega_family != "full" && omega_family != "interval" && omega_family != "dyadic" &&
      omega_family != "cantor")
    p.push_back("omega.family: must be full|interval|dyadic|cantor");
  if (!(omega_volume > 0.0 && omega_volume <= 1.0)) p.push_back("omega.volume: must be in (0, 1]");
  if (omega_block_level < 0) p.push_back("omega.block_level: must be >= 0");
  if (!(eps > 0.0 && eps <= 4.0)) p.push_back("eps: must be in (0, 4]");
  if (threads < 0) p.push_back("threads: must be >= 0");
  return p;
}

uint64_t ExperimentConfig::hash() const {
  return fnv1a64(to_json().dump());  // nlohmann objects iterate sorted by key
}

GridMeasure ExperimentConfig::build_measure() const {
  const TorusGrid g(d, n);
  if (measure_family == "lebesgue") return build_lebesgue(g);
  if (measure_family == "dirac") return build_dirac(g);
  if (measure_family == "cantor") return build_cantor(g, cantor_ratio, cantor_depth);
  return build_random_salem(g, salem_keep, salem_split, salem_depth, measure_seed);
}

MollifierFamily ExperimentConfig::mollifier() const {
  MollifierFamily fam;
  fam.profile = kernel_profile == "gauss" ? KernelProfile::gaussian : KernelProfile::smooth_bump;
  return fam;
}

ScaleFunction ExperimentConfig::build_scale_function(const TorusGrid& g) const {
  if (t_kind == "constant") return scale_constant(g, t_value);
  if (t_kind == "sawtooth") return scale_sawtooth(g);
  return scale_random(g, derive_seed(master_seed, "scale-function"));
}

OmegaSet ExperimentConfig::build_omega(const TorusGrid& g) const {
  if (omega_family == "full") return omega_full(g);
  if (omega_family == "interval") return omega_interval(g, omega_volume);
  if (omega_family == "cantor") return omega_cantor_like(g, cantor_ratio, omega_block_level);
  return omega_random_dyadic(g, omega_volume, omega_block_level,
                             derive_seed(master_seed, "omega"));
}

std::string ExperimentConfig::measure_name() const {
  if (measure_family == "cantor")
    return "cantor(r=" + std::to_string(cantor_ratio) + ",depth=" + std::to_string(cantor_depth) + ")";
  if (measure_family == "salem")
    return "salem(keep=" + std::to_string(salem_keep) + ",split=" + std::to_string(salem_split) +
           ",depth=" + std::to_string(salem_depth) + ",seed=" + std::to_string(measure_seed) + ")";
  return measure_family;
}

std::vector<double> ExperimentConfig::ball_fit_radii(const TorusGrid& g) const {
  if (measure_family == "cantor") return power_radii(g, 1.0 / cantor_ratio);
  if (measure_family == "salem") return power_radii(g, static_cast<double>(salem_split));
  return dyadic_radii(g);
}

}  // namespace uklab
