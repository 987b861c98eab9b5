#include "uklab/reference.hpp"

#include <cmath>
#include <numbers>

namespace uklab::ref {

std::vector<std::complex<double>> dft_1d_naive(const std::vector<std::complex<double>>& in) {
  const size_t n = in.size();
  std::vector<std::complex<double>> out(n);
  for (size_t k = 0; k < n; ++k) {
    std::complex<double> acc = 0.0;
    for (size_t x = 0; x < n; ++x) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) *
                         static_cast<double>(x) / static_cast<double>(n);
      acc += in[x] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

double uk_integral_direct(const GridFunction& f, int k) {
  const TorusGrid& g = f.grid;
  const MultiIndexer big(g.d * (k + 1), g.n);
  const int64_t mask = g.mask();
  double acc = 0.0;
  int64_t idx[16];
  for (int64_t flat = 0; flat < big.total; ++flat) {
    big.unflatten(flat, idx);
    const int64_t* x = idx;
    const int64_t* u = idx + g.d;
    double prod = 1.0;
    for (int c = 0; c < (1 << k); ++c) {
      int64_t sf = 0;
      for (int a = 0; a < g.d; ++a) {
        int64_t coord = x[a];
        for (int i = 0; i < k; ++i)
          if ((c >> i) & 1) coord -= u[i * g.d + a];
        sf = sf * g.n + (coord & mask);
      }
      prod *= f.values[static_cast<size_t>(sf)];
    }
    acc += prod;
  }
  return acc / static_cast<double>(big.total);
}

namespace {

double uk_rec(const std::vector<double>& f, const TorusGrid& g, int k) {
  const MultiIndexer ix = g.indexer();
  if (k == 0) {
    double s = 0.0;
    for (double v : f) s += v;
    return s / static_cast<double>(ix.total);
  }
  const int64_t mask = g.mask();
  std::vector<double> scratch(f.size());
  double acc = 0.0;
  int64_t u[4];
  for (int64_t uf = 0; uf < ix.total; ++uf) {
    ix.unflatten(uf, u);
    int64_t xi[4];
    for (int64_t xf = 0; xf < ix.total; ++xf) {
      ix.unflatten(xf, xi);
      int64_t sf = 0;
      for (int a = 0; a < g.d; ++a) sf = sf * g.n + ((xi[a] - u[a]) & mask);
      scratch[static_cast<size_t>(xf)] =
          f[static_cast<size_t>(xf)] * f[static_cast<size_t>(sf)];
    }
    acc += uk_rec(scratch, g, k - 1);
  }
  return acc / static_cast<double>(ix.total);
}

}  // namespace

double uk_integral_serial(const GridFunction& f, int k) {
  if (k == 0) return f.integral();
  return uk_rec(f.values, f.grid, k);
}

double ball_mass_at(const GridMeasure& mu, const std::vector<int64_t>& center, double r) {
  const TorusGrid& g = mu.grid;
  const double nn = static_cast<double>(g.n);
  const MultiIndexer ix = g.indexer();
  double acc = 0.0;
  int64_t idx[4];
  for (int64_t f = 0; f < ix.total; ++f) {
    const double w = mu.weights[static_cast<size_t>(f)];
    if (w == 0.0) continue;
    ix.unflatten(f, idx);
    double factor = 1.0;
    for (int a = 0; a < g.d; ++a) {
      // signed cell offset relative to the center, wrapped to [-N/2, N/2)
      int64_t o = (idx[a] - center[static_cast<size_t>(a)]) & g.mask();
      if (o >= g.n / 2) o -= g.n;
      const double lo = std::max(-r, static_cast<double>(o) / nn);
      const double hi = std::min(r, static_cast<double>(o + 1) / nn);
      factor *= hi > lo ? (hi - lo) * nn : 0.0;
      if (factor == 0.0) break;
    }
    acc += w * factor;
  }
  return acc;
}

GridFunction conditional_expectation_direct(const GridFunction& f, int s) {
  const TorusGrid& g = f.grid;
  const int64_t side = g.n >> s;
  const MultiIndexer cix(g.d, g.n / side);
  const MultiIndexer ix = g.indexer();
  std::vector<double> out(f.values.size());
  int64_t cell[4];
  for (int64_t flat = 0; flat < ix.total; ++flat) {
    ix.unflatten(flat, cell);
    // cube of this cell
    int64_t cube[4];
    for (int a = 0; a < g.d; ++a) cube[a] = cell[a] / side;
    double sum = 0.0;
    int64_t count = 0;
    int64_t within[4] = {0, 0, 0, 0};
    int64_t cube_cells = 1;
    for (int a = 0; a < g.d; ++a) cube_cells *= side;
    for (int64_t c = 0; c < cube_cells; ++c) {
      int64_t sf = 0;
      for (int a = 0; a < g.d; ++a) sf = sf * g.n + cube[a] * side + within[a];
      sum += f.values[static_cast<size_t>(sf)];
      ++count;
      for (int a = g.d - 1; a >= 0; --a) {
        if (++within[a] < side) break;
        within[a] = 0;
      }
    }
    out[static_cast<size_t>(flat)] = sum / static_cast<double>(count);
  }
  return GridFunction(g, std::move(out));
}

double restricted_maximal_at(const GridFunction& f, const GridFunction& mu_n, int64_t x_flat,
                             int t_samples) {
  const TorusGrid& g = f.grid;
  const MultiIndexer ix = g.indexer();
  int64_t xi[4];
  ix.unflatten(x_flat, xi);
  double x[4];
  for (int a = 0; a < g.d; ++a) x[a] = static_cast<double>(xi[a]) / static_cast<double>(g.n);
  double best = -1e300;
  for (int ti = 0; ti < t_samples; ++ti) {
    const double t = 1.0 + static_cast<double>(ti) / (t_samples - 1);
    double acc = 0.0;
    int64_t yi[4];
    for (int64_t yf = 0; yf < ix.total; ++yf) {
      ix.unflatten(yf, yi);
      double p[4];
      for (int a = 0; a < g.d; ++a)
        p[a] = x[a] + t * static_cast<double>(yi[a]) / static_cast<double>(g.n);
      acc += mu_n.values[static_cast<size_t>(yf)] * f.interpolate(p);
    }
    best = std::max(best, acc / static_cast<double>(ix.total));
  }
  return best;
}

GridFunction restricted_maximal_serial(const GridFunction& f, const GridFunction& mu_n,
                                       int t_samples) {
  const TorusGrid& g = f.grid;
  std::vector<double> out(f.values.size());
  for (int64_t xf = 0; xf < g.cells(); ++xf)
    out[static_cast<size_t>(xf)] = restricted_maximal_at(f, mu_n, xf, t_samples);
  return GridFunction(g, std::move(out));
}

std::complex<double> box_slice_direct(const GridFunction& f, int j,
                                      const std::vector<int64_t>& eta) {
  const TorusGrid& g = f.grid;
  const MultiIndexer big(g.d * (j + 1), g.n);
  const int64_t mask = g.mask();
  std::complex<double> acc = 0.0;
  int64_t idx[16];
  for (int64_t flat = 0; flat < big.total; ++flat) {
    big.unflatten(flat, idx);
    const int64_t* x = idx;
    const int64_t* u = idx + g.d;
    double prod = 1.0;
    for (int c = 0; c < (1 << j); ++c) {
      int64_t sf = 0;
      for (int a = 0; a < g.d; ++a) {
        int64_t coord = x[a];
        for (int i = 0; i < j; ++i)
          if ((c >> i) & 1) coord -= u[i * g.d + a];
        sf = sf * g.n + (coord & mask);
      }
      prod *= f.values[static_cast<size_t>(sf)];
    }
    double phase = 0.0;
    for (int i = 0; i < j * g.d; ++i)
      phase -= 2.0 * std::numbers::pi * static_cast<double>(eta[static_cast<size_t>(i)]) *
               static_cast<double>(u[i]) / static_cast<double>(g.n);
    acc += prod * std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return acc / static_cast<double>(big.total);
}

GridFunction mollify_serial(const GridMeasure& mu, int n, const MollifierFamily& family) {
  const TorusGrid& g = mu.grid;
  const MollifierKernel kern = family.sample_l1(g, n);
  const MultiIndexer ix = g.indexer();
  const int64_t side = kern.side();
  std::vector<double> out(mu.weights.size(), 0.0);
  int64_t idx[4];
  for (int64_t f = 0; f < ix.total; ++f) {
    ix.unflatten(f, idx);
    double acc = 0.0;
    for (int64_t t = 0; t < kern.taps(); ++t) {
      const double c = kern.w[static_cast<size_t>(t)];
      if (c == 0.0) continue;
      int64_t rem = t;
      int64_t src[4];
      for (int a = g.d - 1; a >= 0; --a) {
        const int64_t o = rem % side - kern.radius;
        rem /= side;
        src[a] = (idx[a] - o) & ix.mask;
      }
      acc += c * mu.weights[static_cast<size_t>(ix.flatten(src))];
    }
    out[static_cast<size_t>(f)] = acc;
  }
  return GridFunction(g, std::move(out));
}

}  // namespace uklab::ref
