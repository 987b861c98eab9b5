#ifndef UKLAB_MAXIMAL_HPP
#define UKLAB_MAXIMAL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uklab/common.hpp"
#include "uklab/grid.hpp"
#include "uklab/rng.hpp"

namespace uklab {

/// Measurable scale selector t(x) in [1,2], piecewise constant on cells.
struct ScaleFunction {
  enum class Kind { constant, random, sawtooth };
  TorusGrid grid;
  Kind kind = Kind::constant;
  std::vector<double> values;

  double at_cell(int64_t flat) const { return values[static_cast<size_t>(flat)]; }
  /// Value at a continuous point (the containing cell's value).
  double at_point(const double* p) const;
};

ScaleFunction scale_constant(const TorusGrid& g, double t);
ScaleFunction scale_random(const TorusGrid& g, uint64_t seed);
ScaleFunction scale_sawtooth(const TorusGrid& g, int period_cells = 8);

/// Subset of the torus grid restricted to [0,1)^d, a union of cells.
struct OmegaSet {
  TorusGrid grid;
  std::vector<uint8_t> indicator;
  std::vector<int64_t> cells;  // member cell flats, ascending

  double volume() const {
    return static_cast<double>(cells.size()) / static_cast<double>(grid.cells());
  }
  /// Uniform point of the set (uniform member cell + uniform offset).
  void sample_point(SplitMix64& rng, double* out) const;
};

OmegaSet omega_full(const TorusGrid& g);
OmegaSet omega_interval(const TorusGrid& g, double volume, double offset = 0.0);
OmegaSet omega_random_dyadic(const TorusGrid& g, double volume, int block_level, uint64_t seed);
OmegaSet omega_cantor_like(const TorusGrid& g, double ratio, int depth);

// ---------------------------------------------------------------------------
// Operators
// ---------------------------------------------------------------------------

/// M f(x) = max over a uniform t-grid in [1,2] of the torus integral
/// integral f(x + t y) mu_n(y) dy, with multilinear interpolation for the
/// off-grid argument (nearest-neighbor behind the flag).
GridFunction restricted_maximal(const GridFunction& f, const GridFunction& mu_n, int t_samples,
                                bool nearest = false);

/// sup over dyadic blocks nu in [nu_lo, nu_hi] of the [1,2]-restricted
/// operator at scale t ~ 2^-nu, all against mu_n = phi_n * mu.
GridFunction full_maximal(const GridFunction& f, const GridMeasure& mu,
                          const MollifierFamily& family, int n, int nu_lo, int nu_hi,
                          int t_samples);

/// Dual-side operator: y -> integral g(x - t(x) y) mu_n(x) dx.
GridFunction dual_operator(const GridFunction& g_fn, const GridFunction& mu_n,
                           const ScaleFunction& t);

/// Fixed-selector average M_t f(x) = integral f(x + t(x) y) mu_n(y) dy.
GridFunction selector_average(const GridFunction& f, const GridFunction& mu_n,
                              const ScaleFunction& t);

/// Discrete adjoint of selector_average: the unique A with
/// <g, M_t f> = <f, A> for every f (the interpolation weights are
/// scattered instead of gathered, so the identity is a summation reorder).
GridFunction adjoint_selector_average(const GridFunction& g_fn, const GridFunction& mu_n,
                                      const ScaleFunction& t);

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

struct MCEstimate {
  double value = 0.0;
  double std_error = 0.0;
  int64_t samples = 0;
};

/// Monte Carlo estimate of
///   integral over Omega^k of integral prod_i mu_n(x_i + t(x_i) y) dy dx,
/// with deterministic per-block substreams from the seed.
MCEstimate restricted_strong_type_integral(const OmegaSet& omega, const GridFunction& mu_n,
                                           const ScaleFunction& t, int k, int64_t samples,
                                           uint64_t seed);

/// |Omega^k intersect A| where A = { |x_i|_min <= delta or
/// |x_i - x_j|_min <= delta } with plain coordinates on [0,1)^d.
MCEstimate internal_tangency_measure(const OmegaSet& omega, double delta, int k,
                                     int64_t samples, uint64_t seed);

/// Exact cell-by-cell enumeration of the same set measure (k=2, d=1,
/// N <= 64): per cell pair the area of the union of the three strips is
/// integrated in closed form.
double internal_tangency_exact(const OmegaSet& omega, double delta);

/// Membership in the internal-tangency set A.
bool in_tangency_set(const double* points, int k, int d, double delta);

struct TransverseResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = false;
};

/// Checks integral integral prod_i f_i(x - b_i r) dx dr <=
/// (prod_{i<k} sup|f_i|) ||f_k||_{U^{k+1}}.  Requires pairwise
/// |b_i - b_j|_min >= 1.  Integer b evaluates exactly on the grid.
TransverseResult transverse_inequality_check(const std::vector<GridFunction>& f_list,
                                             const std::vector<std::vector<double>>& b_list);

struct D11Row {
  int n = 0;
  double delta = 0.0;
  double internal = 0.0;
  double internal_se = 0.0;
  double transverse = 0.0;
  double transverse_se = 0.0;
  double bound_internal = 0.0;
  double bound_transverse = 0.0;
};

struct MaximalReport {
  int k = 0;
  double eps = 0.0;
  double alpha_fit = 0.0;
  double beta_fit = 0.0;
  double r_k_value = 0.0;
  double eta0 = 0.0;  // k (eps - (d - alpha))
  double eta1 = 0.0;  // r_k / 2^k - k (d - alpha)
  double eta = 0.0;   // min(eta0, eta1)
  double combined_slope = 0.0;
  double internal_slope = 0.0;
  double slack = 0.3;
  bool degenerate = false;
  bool pass = false;
  std::vector<D11Row> rows;
};

struct D11Options {
  int64_t samples = 1 << 16;
  uint64_t seed = 1;
  double slack = 0.3;
  std::optional<double> alpha_override;
  std::optional<double> beta_override;
  int fit_scale = -1;  // scale for the beta_j fits (-1: max of n range)
};

/// Splits the restricted strong-type integral into the near-diagonal
/// piece over Omega^k cap A (delta = 2^-nk eps, against the mollification
/// mu_n whose sup obeys the ball-condition growth) and the transverse
/// remainder (against the band mu_{n+1} - mu_n whose U^k norm decays),
/// and fits the combined decay against eta = min(eta0, eta1).
MaximalReport theorem_d11_experiment(const GridMeasure& mu, int k, int n_lo, int n_hi,
                                     const OmegaSet& omega, const ScaleFunction& t, double eps,
                                     const MollifierFamily& family = MollifierFamily{},
                                     const D11Options& opts = D11Options{});

}  // namespace uklab

#endif  // UKLAB_MAXIMAL_HPP
