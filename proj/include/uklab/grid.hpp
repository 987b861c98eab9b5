#ifndef UKLAB_GRID_HPP
#define UKLAB_GRID_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "uklab/common.hpp"

namespace uklab {

/// Uniform discretization of the d-torus [0,1)^d with N points per axis.
/// N must be a power of two: the FFT and the dyadic conditional
/// expectation both require it, and it makes torus wrap-around a mask.
struct TorusGrid {
  int d = 1;
  int64_t n = 0;  // points per axis

  TorusGrid() = default;
  TorusGrid(int d_, int64_t n_);

  double spacing() const { return 1.0 / static_cast<double>(n); }
  int64_t cells() const { return indexer().total; }
  int64_t mask() const { return n - 1; }
  int levels() const { return log2_exact(n); }  // log2(N)
  MultiIndexer indexer() const { return MultiIndexer(d, n); }

  bool operator==(const TorusGrid& o) const { return d == o.d && n == o.n; }
};

/// Nonnegative mass per grid cell.  Weights are masses, not densities.
struct GridMeasure {
  TorusGrid grid;
  std::vector<double> weights;
  double mass = 0.0;

  GridMeasure() = default;
  GridMeasure(TorusGrid g, std::vector<double> w);

  void recompute_mass() { mass = pairwise_sum(weights); }
  void normalize();  // scale to mass 1
};

/// Real samples on the grid, interpreted as a density: the integral is
/// the mean of the values (the torus has volume 1).
struct GridFunction {
  TorusGrid grid;
  std::vector<double> values;

  GridFunction() = default;
  GridFunction(TorusGrid g, std::vector<double> v);
  static GridFunction constant(TorusGrid g, double c);

  double integral() const {
    return pairwise_sum(values) / static_cast<double>(grid.cells());
  }
  double sup_abs() const;
  double lp_norm(double p) const;  // (N^-d sum |f|^p)^(1/p); p = inf via sup_abs

  /// Multilinear interpolation at a continuous torus point (length d).
  double interpolate(const double* point) const;
  /// Nearest-neighbor lookup, for exactness experiments.
  double nearest(const double* point) const;
};

GridFunction to_density(const GridMeasure& mu);  // weights * N^d

/// Cyclic shift by whole grid cells (exact re-indexing, no arithmetic).
GridMeasure translate(const GridMeasure& mu, const std::vector<int64_t>& shift);
GridFunction translate(const GridFunction& f, const std::vector<int64_t>& shift);

// ---------------------------------------------------------------------------
// Mollifiers
// ---------------------------------------------------------------------------

enum class KernelProfile { smooth_bump, gaussian };

/// Sampled convolution kernel on the grid: offsets in [-radius, radius]^d,
/// row-major, stored as cell masses (sum 1 for the L1 normalization).
struct MollifierKernel {
  int d = 1;
  int64_t radius = 0;
  std::vector<double> w;

  int64_t side() const { return 2 * radius + 1; }
  int64_t taps() const;
};

/// Family of bumps phi_n of width 2^-n.  phi_n is radially symmetric,
/// supported in a ball of radius 2^-(n+1), and discretely renormalized so
/// the sampled weights sum to exactly 1.
///
/// The derivative-normalized variant rescales the profile so that the
/// unit-scale slope bound sup|phi'| <= 1 holds, matching the convention
/// the scale-lemma checks assume; it is not mass-normalized.
struct MollifierFamily {
  KernelProfile profile = KernelProfile::smooth_bump;

  /// Radial profile p(rho), supported on rho < 1/2, not yet normalized.
  double profile_value(double rho) const;
  /// sup over rho of |dp/drho|, computed once numerically on a fine grid.
  double profile_slope_sup() const;

  bool scale_resolvable(const TorusGrid& g, int n) const {
    // kernel width 2^-n must span at least two cells
    return n >= 0 && (int64_t{1} << (n + 1)) <= g.n;
  }

  MollifierKernel sample_l1(const TorusGrid& g, int n) const;
  MollifierKernel sample_derivative_normalized(const TorusGrid& g, int n) const;
};

/// mu_n = phi_n * mu as a density.  Circular convolution is done directly
/// over the kernel's compact support, which keeps translation covariance
/// bit-exact (the same float ops in the same order, just re-indexed).
GridFunction mollify(const GridMeasure& mu, int n, const MollifierFamily& family);

/// mu_{n+1} - mu_n (the band at scale 2^-n); discrete integral 0.
GridFunction delta_mollify(const GridMeasure& mu, int n, const MollifierFamily& family);

/// Convolve a measure with an arbitrary sampled kernel (masses) into a
/// density.  Used by the scale-lemma checks with the derivative-normalized
/// kernels, where the result is intentionally not mass 1.
GridFunction convolve_measure(const GridMeasure& mu, const MollifierKernel& k);

/// The kernel's density samples laid out on the grid (offset 0 at index 0,
/// negative offsets wrapped), e.g. for transforming it.
GridFunction kernel_density(const TorusGrid& g, const MollifierKernel& k);

// ---------------------------------------------------------------------------
// Measure constructors
// ---------------------------------------------------------------------------

GridMeasure build_lebesgue(const TorusGrid& g);

/// Point mass at index 0.
GridMeasure build_dirac(const TorusGrid& g);

/// Self-similar Cantor measure: at each of `depth` levels every surviving
/// interval keeps its two end pieces of relative length `ratio`.  Interval
/// masses are spread over grid cells proportionally to overlap.  For d > 1
/// the construction is a product across axes.
GridMeasure build_cantor(const TorusGrid& g, double ratio, int depth);

/// Randomized Cantor construction: split each surviving interval into
/// `split` children, keep `keep` of them uniformly at random, divide the
/// mass equally among the kept children.  Reproducible from the seed.
GridMeasure build_random_salem(const TorusGrid& g, int keep, int split, int depth,
                               uint64_t seed);

// ---------------------------------------------------------------------------
// Ball condition
// ---------------------------------------------------------------------------

/// Fitted mu(B(x,r)) <= C_H r^alpha over the given radii.
struct BallConditionFit {
  double alpha = 0.0;
  double c_h = 0.0;
  double residual = 0.0;
  std::vector<double> radii;
  std::vector<double> max_masses;  // M(r) per radius
};

/// Max over grid centers x of mu(B(x,r)), where B(x,r) is the per-axis
/// half-open window prod_a [x_a - r, x_a + r).  Cells are counted by
/// fractional overlap, so for Lebesgue the ball mass is exactly (2r)^d.
double ball_mass_max(const GridMeasure& mu, double r);

/// Least-squares fit of log M(r) = log C_H + alpha log r.  Needs >= 3
/// radii, each in [2/N, 1/4].  alpha is clamped to [0, d].
BallConditionFit ball_condition_fit(const GridMeasure& mu, const std::vector<double>& radii);

/// Default dyadic radii 2^-m, m = 2 .. log2(N)-2.
std::vector<double> dyadic_radii(const TorusGrid& g);
/// Radii base^-m clipped to [2/N, 1/4] (base 3 for the middle-thirds fit).
std::vector<double> power_radii(const TorusGrid& g, double base);

}  // namespace uklab

#endif  // UKLAB_GRID_HPP
