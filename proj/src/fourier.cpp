#include "uklab/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "uklab/fft.hpp"
#include "uklab/fit.hpp"
#include "uklab/gowers.hpp"
#include "uklab/parallel.hpp"

namespace uklab {

std::complex<double> Spectrum::at(const std::vector<int64_t>& freq) const {
  if (freq.size() != dims.size()) throw PreconditionError("Spectrum::at: frequency rank mismatch");
  int64_t flat = 0;
  for (size_t a = 0; a < dims.size(); ++a) {
    const int64_t n = dims[a];
    flat = flat * n + (freq[a] & (n - 1));
  }
  return coef[static_cast<size_t>(flat)];
}

namespace {

Spectrum forward(const std::vector<double>& v, const std::vector<int64_t>& dims, double scale) {
  Spectrum s;
  s.dims = dims;
  s.coef.assign(v.size(), {});
  for (size_t i = 0; i < v.size(); ++i) s.coef[i] = v[i];
  fft_nd(s.coef, s.dims, false);
  if (scale != 1.0)
    for (auto& c : s.coef) c *= scale;
  return s;
}

}  // namespace

Spectrum dft(const GridFunction& f) {
  const std::vector<int64_t> dims(static_cast<size_t>(f.grid.d), f.grid.n);
  return forward(f.values, dims, 1.0 / static_cast<double>(f.grid.cells()));
}

Spectrum dft(const GridMeasure& mu) {
  const std::vector<int64_t> dims(static_cast<size_t>(mu.grid.d), mu.grid.n);
  return forward(mu.weights, dims, 1.0);
}

GridFunction idft(const Spectrum& s, const TorusGrid& g) {
  if (s.total() != g.cells() || static_cast<int>(s.dims.size()) != g.d)
    throw PreconditionError("idft: spectrum shape does not match grid");
  std::vector<std::complex<double>> buf = s.coef;
  fft_nd(buf, s.dims, true);
  std::vector<double> v(buf.size());
  for (size_t i = 0; i < buf.size(); ++i) v[i] = buf[i].real();
  return GridFunction(g, std::move(v));
}

DecayFit envelope_decay_fit(const Spectrum& s, double window_lo, double window_hi,
                            double quantile) {
  if (!(quantile > 0.0 && quantile <= 1.0))
    throw PreconditionError("envelope_decay_fit: quantile must be in (0, 1]");
  if (!(window_lo >= 1.0 && window_hi > window_lo))
    throw PreconditionError("envelope_decay_fit: bad frequency window");
  const int axes = static_cast<int>(s.dims.size());
  for (int64_t n : s.dims)
    if (window_hi > static_cast<double>(n) / 2.0 + 1e-9)
      throw PreconditionError("envelope_decay_fit: window exceeds Nyquist range");

  // gather (|xi|, |coef|) per dyadic band of |xi|
  std::map<int, std::vector<std::pair<double, double>>> band_points;
  const int64_t total = s.total();
  double zero_mag = std::abs(s.coef[0]);
  for (int64_t f = 0; f < total; ++f) {
    int64_t rem = f;
    double r2 = 0.0;
    for (int a = axes - 1; a >= 0; --a) {
      const int64_t n = s.dims[static_cast<size_t>(a)];
      int64_t k = rem % n;
      rem /= n;
      if (k >= n / 2) k -= n;  // signed frequency
      r2 += static_cast<double>(k) * static_cast<double>(k);
    }
    const double r = std::sqrt(r2);
    if (r < window_lo - 1e-12 || r > window_hi + 1e-12 || r == 0.0) continue;
    const int band = static_cast<int>(std::floor(std::log2(r) + 1e-12));
    band_points[band].push_back({r, std::abs(s.coef[static_cast<size_t>(f)])});
  }
  if (band_points.empty()) throw PreconditionError("envelope_decay_fit: empty band");

  DecayFit fit;
  fit.window_lo = window_lo;
  fit.window_hi = window_hi;
  fit.quantile = quantile;

  // A band truncated by the window would hand a non-representative
  // envelope huge leverage in log space; use complete bands only (keep
  // partial ones just when nothing else is left).
  std::map<int, std::vector<std::pair<double, double>>> complete;
  for (auto& [band, pts] : band_points) {
    const double sup = std::ldexp(1.0, band + 1);
    if (std::ldexp(1.0, band) >= window_lo - 1e-9 && sup <= window_hi + 1.0 + 1e-9)
      complete[band] = std::move(pts);
  }
  if (complete.size() >= 2) band_points = std::move(complete);

  double env_max = 0.0;
  for (auto& [band, pts] : band_points) {
    std::sort(pts.begin(), pts.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    size_t qi = static_cast<size_t>(std::ceil(quantile * static_cast<double>(pts.size()))) - 1;
    qi = std::min(qi, pts.size() - 1);
    const double freq = pts[qi].first;
    const double env = pts[qi].second;
    fit.bands.push_back({freq, env});
    env_max = std::max(env_max, env);
  }

  if (env_max <= 1e-13 * std::max(1.0, zero_mag)) {
    fit.degenerate = true;
    return fit;
  }
  if (fit.bands.size() < 2)
    throw PreconditionError("envelope_decay_fit: need at least two dyadic bands in window");

  std::vector<double> lx, ly;
  const double floor_mag = 1e-15 * std::max(1.0, env_max);
  for (const auto& [freq, env] : fit.bands) {
    lx.push_back(std::log(1.0 + freq));
    ly.push_back(std::log(std::max(env, floor_mag)));
  }
  const LineFit lf = fit_line(lx, ly);
  fit.exponent = -lf.slope;
  fit.constant = std::exp(lf.intercept);
  fit.residual = lf.rms;
  return fit;
}

DecayFit fourier_decay_fit(const GridMeasure& mu, double window_lo, double window_hi,
                           double quantile) {
  DecayFit fit = envelope_decay_fit(dft(mu), window_lo, window_hi, quantile);
  const double d = static_cast<double>(mu.grid.d);
  fit.beta = fit.degenerate ? d : std::clamp(2.0 * fit.exponent, 0.0, d);
  return fit;
}

Spectrum box_marginal_spectrum(const GridFunction& f, int j, uint64_t memory_budget) {
  const TorusGrid& g = f.grid;
  if (j < 1 || j > 3) throw PreconditionError("box_marginal_spectrum: order j must be in 1..3");
  if ((j + 1) * g.d > 4)
    throw PreconditionError("box_marginal_spectrum: (j+1)*d exceeds the supported tensor rank 4");
  const MultiIndexer ux(g.d * j, g.n);  // u = (u_1, ..., u_j), each in Z_N^d
  const uint64_t required = static_cast<uint64_t>(ux.total) * (sizeof(double) + sizeof(std::complex<double>));
  if (required > memory_budget)
    throw MemoryBudgetError("box_marginal_spectrum: tensor needs " + std::to_string(required) +
                                " bytes (budget " + std::to_string(memory_budget) + ")",
                            required);

  const MultiIndexer xx(g.d, g.n);
  const int64_t mask = g.mask();
  std::vector<double> marginal(static_cast<size_t>(ux.total));
  const int corners = 1 << j;
  const double inv_cells = 1.0 / static_cast<double>(xx.total);

  parallel_for(ux.total, [&](int64_t uf) {
    int64_t u[4];  // j*d <= 4 coordinates
    ux.unflatten(uf, u);
    // offsets iota.u for each vertex of the cube {0,1}^j
    int64_t offs[8][4];
    for (int c = 0; c < corners; ++c) {
      for (int a = 0; a < g.d; ++a) {
        int64_t acc = 0;
        for (int i = 0; i < j; ++i)
          if ((c >> i) & 1) acc += u[i * g.d + a];
        offs[c][a] = acc;
      }
    }
    double sum = 0.0;
    int64_t x[4];
    for (int64_t xf = 0; xf < xx.total; ++xf) {
      xx.unflatten(xf, x);
      double prod = 1.0;
      for (int c = 0; c < corners; ++c) {
        int64_t sf = 0;
        for (int a = 0; a < g.d; ++a) sf = sf * g.n + ((x[a] - offs[c][a]) & mask);
        prod *= f.values[static_cast<size_t>(sf)];
        if (prod == 0.0) break;
      }
      sum += prod;
    }
    marginal[static_cast<size_t>(uf)] = sum * inv_cells;
  });

  Spectrum s;
  s.dims.assign(static_cast<size_t>(g.d * j), g.n);
  s.coef.assign(marginal.size(), {});
  for (size_t i = 0; i < marginal.size(); ++i) s.coef[i] = marginal[i];
  fft_nd(s.coef, s.dims, false);
  const double scale = 1.0 / static_cast<double>(ux.total);
  for (auto& c : s.coef) c *= scale;
  return s;
}

DecayFit higher_order_decay_fit(const GridMeasure& mu, int j, int n, double window_lo,
                                double window_hi, double quantile,
                                const MollifierFamily& family, uint64_t memory_budget,
                                bool kernel_correction) {
  const GridFunction f = mollify(mu, n, family);
  Spectrum s = box_marginal_spectrum(f, j, memory_budget);

  if (j == 1 && kernel_correction) {
    const Spectrum ker = dft(kernel_density(mu.grid, family.sample_l1(mu.grid, n)));
    constexpr double kInvertible = 0.1;  // |phi hat|^2 below this would amplify noise
    double safe_radius = window_hi;
    const int axes = static_cast<int>(s.dims.size());
    for (int64_t flat = 0; flat < s.total(); ++flat) {
      int64_t rem = flat;
      double r2 = 0.0;
      for (int a = axes - 1; a >= 0; --a) {
        const int64_t nn = s.dims[static_cast<size_t>(a)];
        int64_t k = rem % nn;
        rem /= nn;
        if (k >= nn / 2) k -= nn;
        r2 += static_cast<double>(k) * static_cast<double>(k);
      }
      const double k2 = std::norm(ker.coef[static_cast<size_t>(flat)]);
      if (k2 >= kInvertible) {
        s.coef[static_cast<size_t>(flat)] /= k2;
      } else {
        safe_radius = std::min(safe_radius, std::sqrt(r2) - 1e-9);
      }
    }
    if (safe_radius >= window_lo + 1.0) window_hi = std::min(window_hi, safe_radius);
  }

  DecayFit fit = envelope_decay_fit(s, window_lo, window_hi, quantile);
  const double d = static_cast<double>(mu.grid.d);
  fit.beta = fit.degenerate ? d : std::clamp(2.0 * fit.exponent / (j + 1.0), 0.0, d);
  return fit;
}

Spectrum box_full_spectrum(const GridFunction& f, int j, uint64_t memory_budget) {
  const TorusGrid& g = f.grid;
  if (j < 1 || j > 3) throw PreconditionError("box_full_spectrum: order j must be in 1..3");
  if ((j + 1) * g.d > 4)
    throw PreconditionError("box_full_spectrum: (j+1)*d exceeds the supported tensor rank 4");
  const MultiIndexer ix(g.d * (j + 1), g.n);
  const uint64_t required = static_cast<uint64_t>(ix.total) *
                            (sizeof(double) + sizeof(std::complex<double>));
  if (required > memory_budget)
    throw MemoryBudgetError("box_full_spectrum: tensor needs " + std::to_string(required) +
                                " bytes (budget " + std::to_string(memory_budget) + ")",
                            required);
  const BoxTensor t = box_tensor(f, j, memory_budget);
  Spectrum s;
  s.dims.assign(static_cast<size_t>(g.d * (j + 1)), g.n);
  s.coef.assign(t.values.size(), {});
  for (size_t i = 0; i < t.values.size(); ++i) s.coef[i] = t.values[i];
  fft_nd(s.coef, s.dims, false);
  const double scale = 1.0 / static_cast<double>(ix.total);
  for (auto& c : s.coef) c *= scale;
  return s;
}

DecayFit higher_order_full_tensor_fit(const GridMeasure& mu, int j, int n, double window_lo,
                                      double window_hi, double quantile,
                                      const MollifierFamily& family, uint64_t memory_budget) {
  const GridFunction f = mollify(mu, n, family);
  DecayFit fit = envelope_decay_fit(box_full_spectrum(f, j, memory_budget), window_lo,
                                    window_hi, quantile);
  const double d = static_cast<double>(mu.grid.d);
  fit.beta = fit.degenerate ? d : std::clamp(2.0 * fit.exponent / (j + 1.0), 0.0, d);
  return fit;
}

int default_fit_scale(const TorusGrid& g, int n_hi) {
  return std::clamp(g.levels() - 4, 1, n_hi);
}

double higher_order_auto_window(int fit_scale) {
  return std::max(7.0, std::ldexp(1.0, fit_scale - 2) - 1.0);
}

}  // namespace uklab
