#ifndef UKLAB_REFERENCE_HPP
#define UKLAB_REFERENCE_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include "uklab/grid.hpp"

namespace uklab::ref {

// Straightforward serial implementations of the parallel kernels.  They
// serve two purposes: independent oracles for the unit tests (different
// summation orders and no shared code path with the OpenMP kernels) and
// baselines for the benchmark binary.

/// Naive O(n^2) DFT, forward sign, unnormalized.
std::vector<std::complex<double>> dft_1d_naive(const std::vector<std::complex<double>>& in);

/// Literal (k+1)-fold nested sum of prod_{iota} f(x - iota.u), normalized
/// by N^{-(k+1)d}.  One odometer, no recursion, no threading.
double uk_integral_direct(const GridFunction& f, int k);

/// Serial twin of the streaming uk_integral (same recursion, no OpenMP).
double uk_integral_serial(const GridFunction& f, int k);

/// Direct ball mass mu(B(x,r)) at one center (per-axis overlap product).
double ball_mass_at(const GridMeasure& mu, const std::vector<int64_t>& center, double r);

/// Per-cube averaging by a plain linear sum.
GridFunction conditional_expectation_direct(const GridFunction& f, int s);

/// One point of the restricted maximal operator by direct summation.
double restricted_maximal_at(const GridFunction& f, const GridFunction& mu_n, int64_t x_flat,
                             int t_samples);

/// Serial twin of restricted_maximal (for the benchmark).
GridFunction restricted_maximal_serial(const GridFunction& f, const GridFunction& mu_n,
                                       int t_samples);

/// (0; eta) slice of the box tensor spectrum by direct summation:
/// N^{-(j+1)d} sum_{x,u} prod f(x - iota.u) e(-eta.u).
std::complex<double> box_slice_direct(const GridFunction& f, int j,
                                      const std::vector<int64_t>& eta);

/// Serial twin of mollify (same kernel, plain loops).
GridFunction mollify_serial(const GridMeasure& mu, int n, const MollifierFamily& family);

}  // namespace uklab::ref

#endif  // UKLAB_REFERENCE_HPP
