#include "uklab/fft.hpp"

#include <cmath>
#include <numbers>

#include "uklab/common.hpp"
#include "uklab/parallel.hpp"

namespace uklab {

void fft_pow2(std::complex<double>* a, int64_t n, bool inverse) {
  if (!is_power_of_two(n)) throw PreconditionError("fft: length must be a power of two");
  // bit reversal
  for (int64_t i = 1, j = 0; i < n; ++i) {
    int64_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const double sign = inverse ? 1.0 : -1.0;
  for (int64_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (int64_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (int64_t j = 0; j < len / 2; ++j) {
        const std::complex<double> u = a[i + j];
        const std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

void fft_nd(std::vector<std::complex<double>>& data, const std::vector<int64_t>& dims,
            bool inverse) {
  int64_t total = 1;
  for (int64_t d : dims) total *= d;
  if (static_cast<int64_t>(data.size()) != total)
    throw PreconditionError("fft_nd: data size != product of dims");
  const int axes = static_cast<int>(dims.size());
  for (int axis = 0; axis < axes; ++axis) {
    const int64_t n = dims[static_cast<size_t>(axis)];
    int64_t stride = 1;
    for (int a = axes - 1; a > axis; --a) stride *= dims[static_cast<size_t>(a)];
    const int64_t lines = total / n;
    parallel_for(lines, [&](int64_t line) {
      const int64_t outer = line / stride;
      const int64_t inner = line % stride;
      const int64_t base = outer * n * stride + inner;
      std::vector<std::complex<double>> buf(static_cast<size_t>(n));
      for (int64_t i = 0; i < n; ++i) buf[static_cast<size_t>(i)] = data[static_cast<size_t>(base + i * stride)];
      fft_pow2(buf.data(), n, inverse);
      for (int64_t i = 0; i < n; ++i) data[static_cast<size_t>(base + i * stride)] = buf[static_cast<size_t>(i)];
    });
  }
}

}  // namespace uklab
