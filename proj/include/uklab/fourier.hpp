#ifndef UKLAB_FOURIER_HPP
#define UKLAB_FOURIER_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include "uklab/common.hpp"
#include "uklab/grid.hpp"

namespace uklab {

/// Complex coefficients on an integer frequency lattice, one axis per
/// tensor dimension, frequencies in [-N/2, N/2) per axis (stored in the
/// usual FFT order).
struct Spectrum {
  std::vector<int64_t> dims;
  std::vector<std::complex<double>> coef;

  int64_t total() const {
    int64_t t = 1;
    for (int64_t d : dims) t *= d;
    return t;
  }
  /// Coefficient at a signed frequency multi-index.
  std::complex<double> at(const std::vector<int64_t>& freq) const;
};

/// Forward transform of a density: c(xi) = N^-d sum_x f(x) e(-xi.x).
Spectrum dft(const GridFunction& f);
/// Forward transform of a measure: c(xi) = sum_j w_j e(-xi.x_j).
Spectrum dft(const GridMeasure& mu);
/// Inverse of dft(GridFunction): f(x) = sum_xi c(xi) e(+xi.x).
GridFunction idft(const Spectrum& s, const TorusGrid& g);

/// Fitted power law |coef| ~ constant * (1+|xi|)^-exponent on the upper
/// envelope per dyadic frequency band.  `beta` is the decay dimension
/// derived from the exponent by the caller's convention, clamped to [0,d].
struct DecayFit {
  double exponent = 0.0;
  double constant = 0.0;
  double residual = 0.0;
  double beta = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  double quantile = 1.0;
  bool degenerate = false;                       // all nonzero frequencies vanish
  std::vector<std::pair<double, double>> bands;  // (|xi| representative, envelope)
};

/// Envelope fit of |coef| against (1 + |xi|) over dyadic bands of the
/// Euclidean frequency magnitude, restricted to window_lo <= |xi| <=
/// window_hi (xi != 0).  quantile = 1 takes each band's maximum.
DecayFit envelope_decay_fit(const Spectrum& s, double window_lo, double window_hi,
                            double quantile);

/// Classical Fourier decay of a measure: beta = clamp(2 * exponent, 0, d).
DecayFit fourier_decay_fit(const GridMeasure& mu, double window_lo, double window_hi,
                           double quantile = 1.0);

/// x-marginal of the order-j box tensor of f, transformed over the u
/// variables: slice(eta) = N^{-(j+1)d} sum_{x,u} prod_iota f(x - iota.u)
/// e(-eta.u).  This is the (0; eta) frequency slice of the box tensor.
Spectrum box_marginal_spectrum(const GridFunction& f, int j,
                               uint64_t memory_budget = kDefaultMemoryBudgetBytes);

/// Higher-order decay: fits the (0; eta) slice of the box tensor of
/// mu_n = phi_n * mu; beta_j = clamp(2 * exponent / (j+1), 0, d).
///
/// For j = 1 the slice is exactly |mu_n hat(eta)|^2 = |phi_n hat|^2
/// |mu hat|^2, so with kernel_correction (default) the known kernel
/// factor is divided out and the window clamped to where it is
/// invertible; the fitted beta_1 then measures the measure, not the
/// mollifier roll-off.  No exact correction exists for j >= 2: keep the
/// window inside the kernel passband there.
DecayFit higher_order_decay_fit(const GridMeasure& mu, int j, int n, double window_lo,
                                double window_hi, double quantile = 1.0,
                                const MollifierFamily& family = MollifierFamily{},
                                uint64_t memory_budget = kDefaultMemoryBudgetBytes,
                                bool kernel_correction = true);

/// Full (j+1)d spectrum of the box tensor.  The (0; eta) slice is the
/// default object elsewhere; the full tensor is exposed as an option.
Spectrum box_full_spectrum(const GridFunction& f, int j,
                           uint64_t memory_budget = kDefaultMemoryBudgetBytes);

/// Envelope fit over the full box-tensor spectrum (all frequencies, not
/// just the (0; eta) slice); same beta convention as the slice fit.
DecayFit higher_order_full_tensor_fit(const GridMeasure& mu, int j, int n, double window_lo,
                                      double window_hi, double quantile = 1.0,
                                      const MollifierFamily& family = MollifierFamily{},
                                      uint64_t memory_budget = kDefaultMemoryBudgetBytes);

/// Mollification scale whose sampled kernel still resolves the profile
/// (radius >= 8 cells), capped at n_hi.
int default_fit_scale(const TorusGrid& g, int n_hi);

/// Window staying inside the kernel passband at that scale: the mollifier's
/// own roll-off would otherwise masquerade as measure decay.
double higher_order_auto_window(int fit_scale);

}  // namespace uklab

#endif  // UKLAB_FOURIER_HPP
