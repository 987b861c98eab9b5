#ifndef UKLAB_FFT_HPP
#define UKLAB_FFT_HPP

#include <complex>
#include <cstdint>
#include <vector>

namespace uklab {

/// In-place radix-2 FFT, unnormalized.  n must be a power of two.
/// forward uses e^{-2 pi i k x / n}, inverse e^{+2 pi i k x / n}.
void fft_pow2(std::complex<double>* a, int64_t n, bool inverse);

/// Unnormalized multi-axis FFT over a row-major box (axis lengths in
/// `dims`, each a power of two).  Lines are transformed in parallel.
void fft_nd(std::vector<std::complex<double>>& data, const std::vector<int64_t>& dims,
            bool inverse);

}  // namespace uklab

#endif  // UKLAB_FFT_HPP
