#ifndef UKLAB_DYADIC_HPP
#define UKLAB_DYADIC_HPP

#include <cstdint>
#include <vector>

#include "uklab/common.hpp"
#include "uklab/grid.hpp"

namespace uklab {

/// Level of the dyadic filtration: cubes of side 2^-s.  Resolvable on the
/// grid when 2^-s >= 1/N, i.e. s <= log2(N).
struct DyadicLevel {
  int s = 0;
  DyadicLevel() = default;
  explicit DyadicLevel(int s_) : s(s_) {
    if (s < 0) throw PreconditionError("DyadicLevel: s must be >= 0");
  }
  void check_resolvable(const TorusGrid& g) const {
    if (s > g.levels())
      throw PreconditionError("DyadicLevel: 2^-s finer than the grid (s=" + std::to_string(s) +
                              ", log2 N=" + std::to_string(g.levels()) + ")");
  }
};

/// E_s f: constant on each dyadic cube of side 2^-s, equal to the cube
/// average.  Cube sums are pairwise so idempotence and the tower property
/// are bit-exact.
GridFunction conditional_expectation(const GridFunction& f, DyadicLevel s);

/// Delta_k f = E_{k+1} f - E_k f.
GridFunction martingale_difference(const GridFunction& f, int k);

/// Hardy-Littlewood maximal function over centered dyadic windows:
/// f*(x) = max over r = 2^-m >= 1/N of the average of |f| on the cells j
/// with |j - i| <= rN - 1 per axis.  The r = 1/N window is the cell
/// itself, so f* >= |f| pointwise.
GridFunction hl_maximal(const GridFunction& f);

struct CheckSample {
  double lhs = 0.0;
  double rhs = 0.0;
};

struct Scale1Report {
  double r = 0.0;
  int s = 0;
  double max_ratio = 0.0;
  int violations = 0;
  std::vector<CheckSample> samples;
};

/// |integral of E_s f(x + r y) dmu(y)| <= 5^d f*(x) at sampled centers x.
/// The lemma's operative regime couples the scales (r of order 2^-s);
/// with r 2^s <= 1 the discrete inequality is a theorem.
Scale1Report scale1_check(const GridFunction& f, const GridMeasure& mu, int s, double r,
                          int x_samples, uint64_t seed);

struct Scale2Report {
  double max_ratio = 0.0;
  double bound = 0.0;
  double profile_slope = 0.0;  // sup |phi'| of the normalized profile
  int pairs = 0;
  std::vector<CheckSample> samples;  // (sup difference, bound) per pair
};

/// Kernel Lipschitz bound: for |y1 - y2| <= 2^-s and t in [1,2],
/// sup_z |mu_k((y1-x)/t - z) - mu_k((y2-x)/t - z)| <= 2^-(s - 2 c sqrt(s)).
/// Uses the derivative-normalized kernel family (sup |phi'| <= 1 at unit
/// scale), the convention the bound is stated for.
Scale2Report lipschitz_bound_check(const GridMeasure& mu, int k, int s, double c,
                                   const MollifierFamily& family, int num_pairs, uint64_t seed);

struct Scale3Report {
  double ratio = 0.0;       // ||Mf||_p / (bound * ||f||_p)
  double mf_norm = 0.0;
  double f_norm = 0.0;
  double bound = 0.0;       // 2^-(s - 2 c sqrt(s))
  double projection_norm = 0.0;  // L2 norm of the subtracted E_s f
  double p = 2.0;
};

/// ||M f||_p <= 2^-(s - 2 c sqrt(s)) ||f||_p for E_s f = 0.  The input is
/// projected (f - E_s f) first and the subtraction is recorded.  M is
/// evaluated in its dilation form sup_t t^-d |integral f(z) mu_k((z-x)/t) dz|
/// so the per-cube cancellation underlying the bound is exact.
Scale3Report scale3_check(const GridFunction& f, const GridMeasure& mu, int k, int s, double c,
                          double p, const MollifierFamily& family, int t_samples);

}  // namespace uklab

#endif  // UKLAB_DYADIC_HPP
