#ifndef UKLAB_GOWERS_HPP
#define UKLAB_GOWERS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "uklab/common.hpp"
#include "uklab/grid.hpp"

namespace uklab {

/// Materialized box tensor: values of prod_{iota in {0,1}^k} f(x - iota.u)
/// on grid^{k+1}, row-major in (x; u_1, ..., u_k).
struct BoxTensor {
  TorusGrid grid;
  int order = 0;
  std::vector<double> values;

  MultiIndexer indexer() const { return MultiIndexer(grid.d * (order + 1), grid.n); }
  /// x and us are multi-indices (us = k blocks of d coordinates).
  double at(const int64_t* x, const int64_t* us) const;
};

BoxTensor box_tensor(const GridFunction& f, int k,
                     uint64_t memory_budget = kDefaultMemoryBudgetBytes);

/// integral of the box tensor: N^{-(k+1)d} sum_{x,u} prod f(x - iota.u).
/// Streaming: never materializes the tensor.  Always >= 0 up to roundoff.
double uk_integral(const GridFunction& f, int k);

/// ||f||_{U^k} = (uk_integral)^{1/2^k}; k = 1 reduces to |integral of f|.
double uk_norm(const GridFunction& f, int k);

/// Independent U^2 oracle: (sum_xi |fhat(xi)|^4)^{1/4} via the FFT.
double uk_norm_spectral_u2(const GridFunction& f);

struct RateInputs {
  double beta = 0.0;
  int d = 1;
  int k = 2;
};

/// r_k = (prod_{j=3}^{k} [2 - 2^{3j-2} / (2^{3j-2} - (1 - (j+1)beta/(jd)))]) * (2beta - d).
/// Empty product for k = 2.  Throws if a bracket denominator vanishes
/// (reporting the offending j).
double r_k(const RateInputs& in);

/// Numerically smallest beta on a step grid with r_k(beta) > 0.  No
/// closed-form threshold is known, so it is reported rather than assumed.
double r_k_positive_threshold(int d, int k, double step = 1e-3);

/// Per-scale Gowers norms of the mollification bands and the fitted decay
/// slope, compared against the predicted -r_k / 2^k.
struct GowersReport {
  int k = 0;
  std::vector<int> scales;
  std::vector<double> norms;       // ||mu_{n+1} - mu_n||_{U^k}
  std::vector<double> bounds;      // anchored reference bound per scale
  double slope = 0.0;              // log2 norm per unit n
  double beta_fit = 0.0;
  double r_k_value = 0.0;
  double predicted_slope = 0.0;    // -r_k / 2^k
  double slack = 0.25;
  double flat_guard = 0.15;
  bool degenerate = false;         // all bands vanish (e.g. Lebesgue)
  bool pass = false;
};

struct Prop1Options {
  double slack = 0.25;       // the rate bound carries an unspecified constant
  double flat_guard = 0.15;  // clearly growing sequences must not pass
  std::optional<double> beta_override;  // skip the spectral fit when set
  int fit_scale = -1;        // mollification scale for the beta_j fits (-1: max of range)
  double quantile = 1.0;
};

GowersReport prop1_decay_check(const GridMeasure& mu, int k, int n_lo, int n_hi,
                               const MollifierFamily& family = MollifierFamily{},
                               const Prop1Options& opts = Prop1Options{});

}  // namespace uklab

#endif  // UKLAB_GOWERS_HPP
