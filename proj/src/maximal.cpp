#include "uklab/maximal.hpp"

#include <algorithm>
#include <cmath>

#include "uklab/fit.hpp"
#include "uklab/fourier.hpp"
#include "uklab/gowers.hpp"
#include "uklab/parallel.hpp"

namespace uklab {

double ScaleFunction::at_point(const double* p) const {
  const int64_t n = grid.n, mask = grid.mask();
  int64_t flat = 0;
  for (int a = 0; a < grid.d; ++a) {
    const int64_t i = static_cast<int64_t>(std::floor(p[a] * static_cast<double>(n)));
    flat = flat * n + (i & mask);
  }
  return values[static_cast<size_t>(flat)];
}

namespace {

void validate_scale_values(const std::vector<double>& v) {
  for (double t : v)
    if (!(t >= 1.0 && t <= 2.0)) throw PreconditionError("ScaleFunction: values must be in [1,2]");
}

}  // namespace

ScaleFunction scale_constant(const TorusGrid& g, double t) {
  ScaleFunction s;
  s.grid = g;
  s.kind = ScaleFunction::Kind::constant;
  s.values.assign(static_cast<size_t>(g.cells()), t);
  validate_scale_values(s.values);
  return s;
}

ScaleFunction scale_random(const TorusGrid& g, uint64_t seed) {
  ScaleFunction s;
  s.grid = g;
  s.kind = ScaleFunction::Kind::random;
  s.values.resize(static_cast<size_t>(g.cells()));
  SplitMix64 rng(seed);
  for (double& v : s.values) v = 1.0 + rng.next_double();
  validate_scale_values(s.values);
  return s;
}

ScaleFunction scale_sawtooth(const TorusGrid& g, int period_cells) {
  if (period_cells < 2) throw PreconditionError("scale_sawtooth: period must be >= 2");
  ScaleFunction s;
  s.grid = g;
  s.kind = ScaleFunction::Kind::sawtooth;
  s.values.resize(static_cast<size_t>(g.cells()));
  for (int64_t i = 0; i < g.cells(); ++i) {
    const int64_t ph = i % period_cells;
    const double frac = static_cast<double>(ph) / static_cast<double>(period_cells - 1);
    s.values[static_cast<size_t>(i)] = 1.0 + std::abs(2.0 * frac - 1.0);
  }
  validate_scale_values(s.values);
  return s;
}

void OmegaSet::sample_point(SplitMix64& rng, double* out) const {
  if (cells.empty()) throw PreconditionError("OmegaSet: cannot sample the empty set");
  const int64_t flat = cells[static_cast<size_t>(rng.next_below(cells.size()))];
  const MultiIndexer ix = grid.indexer();
  int64_t idx[4];
  ix.unflatten(flat, idx);
  for (int a = 0; a < grid.d; ++a)
    out[a] = (static_cast<double>(idx[a]) + rng.next_double()) / static_cast<double>(grid.n);
}

namespace {

OmegaSet finalize_omega(const TorusGrid& g, std::vector<uint8_t> ind) {
  OmegaSet o;
  o.grid = g;
  o.indicator = std::move(ind);
  for (int64_t i = 0; i < g.cells(); ++i)
    if (o.indicator[static_cast<size_t>(i)]) o.cells.push_back(i);
  return o;
}

}  // namespace

OmegaSet omega_full(const TorusGrid& g) {
  return finalize_omega(g, std::vector<uint8_t>(static_cast<size_t>(g.cells()), 1));
}

OmegaSet omega_interval(const TorusGrid& g, double volume, double offset) {
  if (!(volume > 0.0 && volume <= 1.0))
    throw PreconditionError("omega_interval: volume must be in (0, 1]");
  std::vector<uint8_t> ind(static_cast<size_t>(g.cells()), 0);
  // axis-aligned cube of per-axis side volume^(1/d)
  const double side = std::pow(volume, 1.0 / g.d);
  const int64_t span = std::max<int64_t>(1, static_cast<int64_t>(std::llround(side * static_cast<double>(g.n))));
  const int64_t start = static_cast<int64_t>(std::llround(offset * static_cast<double>(g.n)));
  const MultiIndexer ix = g.indexer();
  int64_t idx[4];
  for (int64_t f = 0; f < ix.total; ++f) {
    ix.unflatten(f, idx);
    bool in = true;
    for (int a = 0; a < g.d; ++a) {
      const int64_t rel = (idx[a] - start) & g.mask();
      if (rel >= span) {
        in = false;
        break;
      }
    }
    ind[static_cast<size_t>(f)] = in ? 1 : 0;
  }
  return finalize_omega(g, std::move(ind));
}

OmegaSet omega_random_dyadic(const TorusGrid& g, double volume, int block_level, uint64_t seed) {
  if (!(volume > 0.0 && volume <= 1.0))
    throw PreconditionError("omega_random_dyadic: volume must be in (0, 1]");
  if (block_level < 0 || block_level > g.levels())
    throw PreconditionError("omega_random_dyadic: block level unresolvable");
  const int64_t side = g.n >> block_level;  // cells per block edge
  const MultiIndexer bix(g.d, g.n / side);
  int64_t block_cells = 1;
  for (int a = 0; a < g.d; ++a) block_cells *= side;
  const int64_t want_blocks = std::max<int64_t>(
      1, static_cast<int64_t>(std::llround(volume * static_cast<double>(g.cells()) /
                                           static_cast<double>(block_cells))));
  std::vector<int64_t> order(static_cast<size_t>(bix.total));
  for (int64_t i = 0; i < bix.total; ++i) order[static_cast<size_t>(i)] = i;
  SplitMix64 rng(seed);
  for (int64_t i = bix.total - 1; i > 0; --i) {
    const int64_t j = static_cast<int64_t>(rng.next_below(static_cast<uint64_t>(i + 1)));
    std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
  }
  std::vector<uint8_t> ind(static_cast<size_t>(g.cells()), 0);
  const int64_t chosen = std::min(want_blocks, bix.total);
  for (int64_t b = 0; b < chosen; ++b) {
    int64_t block[4];
    bix.unflatten(order[static_cast<size_t>(b)], block);
    int64_t within[4] = {0, 0, 0, 0};
    for (int64_t c = 0; c < block_cells; ++c) {
      int64_t flat = 0;
      for (int a = 0; a < g.d; ++a) flat = flat * g.n + block[a] * side + within[a];
      ind[static_cast<size_t>(flat)] = 1;
      for (int a = g.d - 1; a >= 0; --a) {
        if (++within[a] < side) break;
        within[a] = 0;
      }
    }
  }
  return finalize_omega(g, std::move(ind));
}

OmegaSet omega_cantor_like(const TorusGrid& g, double ratio, int depth) {
  const GridMeasure mu = build_cantor(g, ratio, depth);
  std::vector<uint8_t> ind(static_cast<size_t>(g.cells()), 0);
  for (int64_t i = 0; i < g.cells(); ++i)
    ind[static_cast<size_t>(i)] = mu.weights[static_cast<size_t>(i)] > 0.0 ? 1 : 0;
  return finalize_omega(g, std::move(ind));
}

// ---------------------------------------------------------------------------
// Operators
// ---------------------------------------------------------------------------

namespace {

double integrate_translate_scale(const GridFunction& f, const GridFunction& mu_n,
                                 const double* x, double t, bool nearest) {
  const TorusGrid& g = f.grid;
  const MultiIndexer ix = g.indexer();
  const double invn = 1.0 / static_cast<double>(g.n);
  double acc = 0.0;
  int64_t yi[4];
  for (int64_t yf = 0; yf < ix.total; ++yf) {
    const double w = mu_n.values[static_cast<size_t>(yf)];
    if (w == 0.0) continue;
    ix.unflatten(yf, yi);
    double p[4];
    for (int a = 0; a < g.d; ++a) p[a] = x[a] + t * static_cast<double>(yi[a]) * invn;
    acc += w * (nearest ? f.nearest(p) : f.interpolate(p));
  }
  return acc / static_cast<double>(ix.total);
}

}  // namespace

GridFunction restricted_maximal(const GridFunction& f, const GridFunction& mu_n, int t_samples,
                                bool nearest) {
  if (t_samples < 2) throw PreconditionError("restricted_maximal: need t_samples >= 2");
  const TorusGrid& g = f.grid;
  if (!(mu_n.grid == g)) throw PreconditionError("restricted_maximal: grid mismatch");
  const MultiIndexer ix = g.indexer();
  std::vector<double> out(static_cast<size_t>(ix.total), 0.0);
  parallel_for(ix.total, [&](int64_t xf) {
    int64_t xi[4];
    ix.unflatten(xf, xi);
    double x[4];
    for (int a = 0; a < g.d; ++a) x[a] = static_cast<double>(xi[a]) / static_cast<double>(g.n);
    double best = -1e300;
    for (int ti = 0; ti < t_samples; ++ti) {
      const double t = 1.0 + static_cast<double>(ti) / (t_samples - 1);
      best = std::max(best, integrate_translate_scale(f, mu_n, x, t, nearest));
    }
    out[static_cast<size_t>(xf)] = best;
  });
  return GridFunction(g, std::move(out));
}

GridFunction full_maximal(const GridFunction& f, const GridMeasure& mu,
                          const MollifierFamily& family, int n, int nu_lo, int nu_hi,
                          int t_samples) {
  if (nu_lo < 0 || nu_hi < nu_lo) throw PreconditionError("full_maximal: bad nu range");
  if (t_samples < 2) throw PreconditionError("full_maximal: need t_samples >= 2");
  const GridFunction mu_n = mollify(mu, n, family);
  const TorusGrid& g = f.grid;
  const MultiIndexer ix = g.indexer();
  std::vector<double> out(static_cast<size_t>(ix.total), -1e300);
  for (int nu = nu_lo; nu <= nu_hi; ++nu) {
    const double scale = std::exp2(static_cast<double>(-nu));
    parallel_for(ix.total, [&](int64_t xf) {
      int64_t xi[4];
      ix.unflatten(xf, xi);
      double x[4];
      for (int a = 0; a < g.d; ++a) x[a] = static_cast<double>(xi[a]) / static_cast<double>(g.n);
      double best = out[static_cast<size_t>(xf)];
      for (int ti = 0; ti < t_samples; ++ti) {
        const double t = scale * (1.0 + static_cast<double>(ti) / (t_samples - 1));
        best = std::max(best, integrate_translate_scale(f, mu_n, x, t, false));
      }
      out[static_cast<size_t>(xf)] = best;
    });
  }
  return GridFunction(g, std::move(out));
}

GridFunction dual_operator(const GridFunction& g_fn, const GridFunction& mu_n,
                           const ScaleFunction& t) {
  const TorusGrid& g = g_fn.grid;
  if (!(mu_n.grid == g) || !(t.grid == g)) throw PreconditionError("dual_operator: grid mismatch");
  const MultiIndexer ix = g.indexer();
  const double invn = 1.0 / static_cast<double>(g.n);
  std::vector<double> out(static_cast<size_t>(ix.total), 0.0);
  parallel_for(ix.total, [&](int64_t yf) {
    int64_t yi[4];
    ix.unflatten(yf, yi);
    double y[4];
    for (int a = 0; a < g.d; ++a) y[a] = static_cast<double>(yi[a]) * invn;
    double acc = 0.0;
    int64_t xi[4];
    for (int64_t xf = 0; xf < ix.total; ++xf) {
      const double w = mu_n.values[static_cast<size_t>(xf)];
      if (w == 0.0) continue;
      ix.unflatten(xf, xi);
      const double tv = t.at_cell(xf);
      double p[4];
      for (int a = 0; a < g.d; ++a) p[a] = static_cast<double>(xi[a]) * invn - tv * y[a];
      acc += w * g_fn.interpolate(p);
    }
    out[static_cast<size_t>(yf)] = acc / static_cast<double>(ix.total);
  });
  return GridFunction(g, std::move(out));
}

GridFunction selector_average(const GridFunction& f, const GridFunction& mu_n,
                              const ScaleFunction& t) {
  const TorusGrid& g = f.grid;
  const MultiIndexer ix = g.indexer();
  std::vector<double> out(static_cast<size_t>(ix.total), 0.0);
  parallel_for(ix.total, [&](int64_t xf) {
    int64_t xi[4];
    ix.unflatten(xf, xi);
    double x[4];
    for (int a = 0; a < g.d; ++a) x[a] = static_cast<double>(xi[a]) / static_cast<double>(g.n);
    out[static_cast<size_t>(xf)] = integrate_translate_scale(f, mu_n, x, t.at_cell(xf), false);
  });
  return GridFunction(g, std::move(out));
}

GridFunction adjoint_selector_average(const GridFunction& g_fn, const GridFunction& mu_n,
                                      const ScaleFunction& t) {
  const TorusGrid& g = g_fn.grid;
  const MultiIndexer ix = g.indexer();
  const int64_t n = g.n, mask = g.mask();
  const int corners = 1 << g.d;
  // fixed chunking over x keeps the scatter deterministic
  const int64_t chunks = std::min<int64_t>(16, ix.total);
  const int64_t chunk = (ix.total + chunks - 1) / chunks;
  std::vector<std::vector<double>> partial(
      static_cast<size_t>(chunks), std::vector<double>(static_cast<size_t>(ix.total), 0.0));
  parallel_for(chunks, [&](int64_t ci) {
    std::vector<double>& acc = partial[static_cast<size_t>(ci)];
    const int64_t lo = ci * chunk;
    const int64_t hi = std::min(lo + chunk, ix.total);
    int64_t xi[4], yi[4];
    for (int64_t xf = lo; xf < hi; ++xf) {
      const double gx = g_fn.values[static_cast<size_t>(xf)];
      if (gx == 0.0) continue;
      ix.unflatten(xf, xi);
      const double tv = t.at_cell(xf);
      for (int64_t yf = 0; yf < ix.total; ++yf) {
        const double w = mu_n.values[static_cast<size_t>(yf)];
        if (w == 0.0) continue;
        ix.unflatten(yf, yi);
        const double coeff = gx * w;
        int64_t base[4];
        double frac[4];
        for (int a = 0; a < g.d; ++a) {
          // x_a + t*y_a in grid units
          const double q = static_cast<double>(xi[a]) + tv * static_cast<double>(yi[a]);
          const double fl = std::floor(q);
          base[a] = static_cast<int64_t>(fl);
          frac[a] = q - fl;
        }
        for (int c = 0; c < corners; ++c) {
          double wgt = coeff;
          int64_t flat = 0;
          for (int a = 0; a < g.d; ++a) {
            const int bit = (c >> a) & 1;
            wgt *= bit ? frac[a] : 1.0 - frac[a];
            flat = flat * n + ((base[a] + bit) & mask);
          }
          acc[static_cast<size_t>(flat)] += wgt;
        }
      }
    }
  });
  std::vector<double> out(static_cast<size_t>(ix.total), 0.0);
  for (int64_t ci = 0; ci < chunks; ++ci) {
    const std::vector<double>& acc = partial[static_cast<size_t>(ci)];
    for (int64_t i = 0; i < ix.total; ++i) out[static_cast<size_t>(i)] += acc[static_cast<size_t>(i)];
  }
  const double scale = 1.0 / static_cast<double>(ix.total);
  for (double& v : out) v *= scale;
  return GridFunction(g, std::move(out));
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

namespace {

double product_inner_integral(const GridFunction& mu_n, const double (*pts)[4], const double* ts,
                              int k) {
  const TorusGrid& g = mu_n.grid;
  const MultiIndexer ix = g.indexer();
  const double invn = 1.0 / static_cast<double>(g.n);
  double acc = 0.0;
  int64_t yi[4];
  for (int64_t yf = 0; yf < ix.total; ++yf) {
    ix.unflatten(yf, yi);
    double prod = 1.0;
    for (int i = 0; i < k; ++i) {
      double p[4];
      for (int a = 0; a < g.d; ++a)
        p[a] = pts[i][a] + ts[i] * static_cast<double>(yi[a]) * invn;
      prod *= mu_n.interpolate(p);
      if (prod == 0.0) break;
    }
    acc += prod;
  }
  return acc / static_cast<double>(ix.total);
}

}  // namespace

MCEstimate restricted_strong_type_integral(const OmegaSet& omega, const GridFunction& mu_n,
                                           const ScaleFunction& t, int k, int64_t samples,
                                           uint64_t seed) {
  if (k < 2 || k > 3) throw PreconditionError("restricted_strong_type_integral: k must be 2 or 3");
  if (omega.cells.empty()) throw PreconditionError("restricted_strong_type_integral: empty Omega");
  if (samples < 16) throw PreconditionError("restricted_strong_type_integral: too few samples");

  const int64_t block_size = 512;
  const int64_t blocks = (samples + block_size - 1) / block_size;
  std::vector<double> sum(static_cast<size_t>(blocks), 0.0), sum2(static_cast<size_t>(blocks), 0.0);
  parallel_for(blocks, [&](int64_t b) {
    SplitMix64 rng(derive_seed(seed, static_cast<uint64_t>(b)));
    const int64_t lo = b * block_size;
    const int64_t hi = std::min(lo + block_size, samples);
    double s = 0.0, s2 = 0.0;
    for (int64_t m = lo; m < hi; ++m) {
      double pts[3][4];
      double ts[3];
      for (int i = 0; i < k; ++i) {
        omega.sample_point(rng, pts[i]);
        ts[i] = t.at_point(pts[i]);
      }
      const double v = product_inner_integral(mu_n, pts, ts, k);
      s += v;
      s2 += v * v;
    }
    sum[static_cast<size_t>(b)] = s;
    sum2[static_cast<size_t>(b)] = s2;
  });
  const double total = pairwise_sum(sum);
  const double total2 = pairwise_sum(sum2);
  const double m = static_cast<double>(samples);
  const double mean = total / m;
  const double var = std::max(0.0, total2 / m - mean * mean);
  const double volk = std::pow(omega.volume(), k);
  MCEstimate est;
  est.value = volk * mean;
  est.std_error = volk * std::sqrt(var / m);
  est.samples = samples;
  return est;
}

bool in_tangency_set(const double* points, int k, int d, double delta) {
  for (int i = 0; i < k; ++i) {
    double mn = 1e300;
    for (int a = 0; a < d; ++a) mn = std::min(mn, std::abs(points[i * d + a]));
    if (mn <= delta) return true;
  }
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      double mn = 1e300;
      for (int a = 0; a < d; ++a) mn = std::min(mn, std::abs(points[i * d + a] - points[j * d + a]));
      if (mn <= delta) return true;
    }
  return false;
}

MCEstimate internal_tangency_measure(const OmegaSet& omega, double delta, int k,
                                     int64_t samples, uint64_t seed) {
  if (!(delta >= 0.0 && delta <= 0.5))
    throw PreconditionError("internal_tangency_measure: delta must be in [0, 1/2]");
  if (k < 2 || k > 4) throw PreconditionError("internal_tangency_measure: k must be in 2..4");
  if (samples < 10000) throw PreconditionError("internal_tangency_measure: need >= 10^4 samples");
  const int d = omega.grid.d;
  const int64_t block_size = 4096;
  const int64_t blocks = (samples + block_size - 1) / block_size;
  std::vector<double> hits(static_cast<size_t>(blocks), 0.0);
  parallel_for(blocks, [&](int64_t b) {
    SplitMix64 rng(derive_seed(seed, static_cast<uint64_t>(b)));
    const int64_t lo = b * block_size;
    const int64_t hi = std::min(lo + block_size, samples);
    double h = 0.0;
    for (int64_t m = lo; m < hi; ++m) {
      double pts[16];
      for (int i = 0; i < k; ++i) omega.sample_point(rng, pts + i * d);
      if (in_tangency_set(pts, k, d, delta)) h += 1.0;
    }
    hits[static_cast<size_t>(b)] = h;
  });
  const double hit = pairwise_sum(hits);
  const double m = static_cast<double>(samples);
  const double p = hit / m;
  const double volk = std::pow(omega.volume(), k);
  MCEstimate est;
  est.value = volk * p;
  est.std_error = volk * std::sqrt(std::max(0.0, p * (1.0 - p)) / m);
  est.samples = samples;
  return est;
}

namespace {

/// integral over x in [a1,b1] of |[x-delta, x+delta] cap [a2,b2]| dx.
double band_area(double a1, double b1, double a2, double b2, double delta) {
  if (b1 <= a1 || b2 <= a2) return 0.0;
  double breaks[6] = {a1, b1, a2 - delta, a2 + delta, b2 - delta, b2 + delta};
  std::sort(breaks, breaks + 6);
  auto len = [&](double x) {
    return std::max(0.0, std::min(x + delta, b2) - std::max(x - delta, a2));
  };
  double acc = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double lo = std::clamp(breaks[i], a1, b1);
    const double hi = std::clamp(breaks[i + 1], a1, b1);
    if (hi > lo) acc += 0.5 * (len(lo) + len(hi)) * (hi - lo);  // integrand linear here
  }
  return acc;
}

}  // namespace

double internal_tangency_exact(const OmegaSet& omega, double delta) {
  const TorusGrid& g = omega.grid;
  if (g.d != 1) throw PreconditionError("internal_tangency_exact: implemented for d = 1");
  if (g.n > 64) throw PreconditionError("internal_tangency_exact: N <= 64 only");
  const double h = 1.0 / static_cast<double>(g.n);
  double total = 0.0;
  for (int64_t c1 : omega.cells) {
    const double a1 = static_cast<double>(c1) * h, b1 = a1 + h;
    const double e1 = std::max(0.0, std::min(b1, delta) - a1);  // |{x1 <= delta}|
    for (int64_t c2 : omega.cells) {
      const double a2 = static_cast<double>(c2) * h, b2 = a2 + h;
      const double e2 = std::max(0.0, std::min(b2, delta) - a2);
      const double a3 = band_area(a1, b1, a2, b2, delta);
      const double a12 = e1 * e2;
      const double a13 = band_area(a1, std::min(b1, delta), a2, b2, delta);
      const double a23 = band_area(a1, b1, a2, std::min(b2, delta), delta);
      const double a123 = band_area(a1, std::min(b1, delta), a2, std::min(b2, delta), delta);
      total += e1 * (b2 - a2) + e2 * (b1 - a1) + a3 - a12 - a13 - a23 + a123;
    }
  }
  return total;
}

TransverseResult transverse_inequality_check(const std::vector<GridFunction>& f_list,
                                             const std::vector<std::vector<double>>& b_list) {
  if (f_list.size() < 2) throw PreconditionError("transverse_inequality_check: need k+1 >= 2 functions");
  if (f_list.size() != b_list.size())
    throw PreconditionError("transverse_inequality_check: |f_list| != |b_list|");
  const int k = static_cast<int>(f_list.size()) - 1;
  const TorusGrid& g = f_list.front().grid;
  for (const auto& f : f_list)
    if (!(f.grid == g)) throw PreconditionError("transverse_inequality_check: grid mismatch");
  for (const auto& b : b_list)
    if (static_cast<int>(b.size()) != g.d)
      throw PreconditionError("transverse_inequality_check: vector dimension mismatch");
  for (size_t i = 0; i < b_list.size(); ++i)
    for (size_t j = i + 1; j < b_list.size(); ++j) {
      double mn = 1e300;
      for (int a = 0; a < g.d; ++a) mn = std::min(mn, std::abs(b_list[i][a] - b_list[j][a]));
      if (mn < 1.0 - 1e-12)
        throw PreconditionError("transverse_inequality_check: separation |b_i - b_j| >= 1 violated");
    }

  bool integer_b = true;
  for (const auto& b : b_list)
    for (double v : b)
      if (v != std::floor(v)) integer_b = false;

  const MultiIndexer ix = g.indexer();
  const int64_t mask = g.mask();
  const double invn = 1.0 / static_cast<double>(g.n);
  const double lhs_total = block_sum(ix.total, [&](int64_t xf) {
    int64_t xi[4], ri[4];
    ix.unflatten(xf, xi);
    double acc = 0.0;
    for (int64_t rf = 0; rf < ix.total; ++rf) {
      ix.unflatten(rf, ri);
      double prod = 1.0;
      for (int i = 0; i <= k && prod != 0.0; ++i) {
        if (integer_b) {
          int64_t sf = 0;
          for (int a = 0; a < g.d; ++a) {
            const int64_t bo = static_cast<int64_t>(b_list[static_cast<size_t>(i)][a]);
            sf = sf * g.n + ((xi[a] - bo * ri[a]) & mask);
          }
          prod *= f_list[static_cast<size_t>(i)].values[static_cast<size_t>(sf)];
        } else {
          double p[4];
          for (int a = 0; a < g.d; ++a)
            p[a] = (static_cast<double>(xi[a]) -
                    b_list[static_cast<size_t>(i)][a] * static_cast<double>(ri[a])) *
                   invn;
          prod *= f_list[static_cast<size_t>(i)].interpolate(p);
        }
      }
      acc += prod;
    }
    return acc;
  });
  TransverseResult res;
  res.lhs = lhs_total / (static_cast<double>(ix.total) * static_cast<double>(ix.total));
  double sup_prod = 1.0;
  for (int i = 0; i < k; ++i) sup_prod *= f_list[static_cast<size_t>(i)].sup_abs();
  res.rhs = sup_prod * uk_norm(f_list[static_cast<size_t>(k)], k + 1);
  res.ok = res.lhs <= res.rhs + 1e-9;
  return res;
}

MaximalReport theorem_d11_experiment(const GridMeasure& mu, int k, int n_lo, int n_hi,
                                     const OmegaSet& omega, const ScaleFunction& t, double eps,
                                     const MollifierFamily& family, const D11Options& opts) {
  if (k < 2 || k > 3) throw PreconditionError("theorem_d11_experiment: k must be 2 or 3");
  if (n_hi < n_lo) throw PreconditionError("theorem_d11_experiment: empty scale range");
  const TorusGrid& g = mu.grid;
  const double d = static_cast<double>(g.d);

  MaximalReport rep;
  rep.k = k;
  rep.eps = eps;
  rep.slack = opts.slack;

  rep.alpha_fit = opts.alpha_override ? *opts.alpha_override
                                      : ball_condition_fit(mu, dyadic_radii(g)).alpha;
  if (!(eps > d - rep.alpha_fit))
    throw PreconditionError(
        "theorem_d11_experiment: hypothesis eps > d - alpha fails (alpha_fit=" +
        std::to_string(rep.alpha_fit) + ", d=" + std::to_string(g.d) +
        ", eps=" + std::to_string(eps) + "); the internal-tangency bound has no decay here");

  if (opts.beta_override) {
    rep.beta_fit = *opts.beta_override;
  } else {
    double beta = d;
    for (int j = 1; j <= k - 1; ++j) {
      const int fs = opts.fit_scale >= 0
                         ? opts.fit_scale
                         : (j == 1 ? g.levels() - 2 : default_fit_scale(g, n_hi));
      const double whi =
          j == 1 ? static_cast<double>(g.n) / 4.0 : higher_order_auto_window(fs);
      beta = std::min(beta, higher_order_decay_fit(mu, j, fs, 1.0, whi).beta);
    }
    rep.beta_fit = beta;
  }
  rep.r_k_value = r_k(RateInputs{std::clamp(rep.beta_fit, 1e-9, d), g.d, k});
  rep.eta0 = k * (eps - (d - rep.alpha_fit));
  rep.eta1 = rep.r_k_value * std::ldexp(1.0, -k) - k * (d - rep.alpha_fit);
  rep.eta = std::min(rep.eta0, rep.eta1);

  for (int n = n_lo; n <= n_hi; ++n) {
    const double delta = std::exp2(-static_cast<double>(n) * k * eps);
    const GridFunction moll = mollify(mu, n, family);
    const GridFunction band = delta_mollify(mu, n, family);

    const int64_t block_size = 512;
    const int64_t blocks = (opts.samples + block_size - 1) / block_size;
    std::vector<double> s_int(static_cast<size_t>(blocks), 0.0),
        s2_int(static_cast<size_t>(blocks), 0.0), s_tr(static_cast<size_t>(blocks), 0.0),
        s2_tr(static_cast<size_t>(blocks), 0.0);
    parallel_for(blocks, [&](int64_t b) {
      SplitMix64 rng(derive_seed(opts.seed ^ static_cast<uint64_t>(n * 1315423911u),
                                 static_cast<uint64_t>(b)));
      const int64_t lo = b * block_size;
      const int64_t hi = std::min(lo + block_size, opts.samples);
      double si = 0.0, si2 = 0.0, st = 0.0, st2 = 0.0;
      for (int64_t m = lo; m < hi; ++m) {
        double pts[3][4];
        double ts[3];
        double flat_pts[16];
        for (int i = 0; i < k; ++i) {
          omega.sample_point(rng, pts[i]);
          ts[i] = t.at_point(pts[i]);
          for (int a = 0; a < g.d; ++a) flat_pts[i * g.d + a] = pts[i][a];
        }
        if (in_tangency_set(flat_pts, k, g.d, delta)) {
          const double v = product_inner_integral(moll, pts, ts, k);
          si += v;
          si2 += v * v;
        } else {
          const double v = product_inner_integral(band, pts, ts, k);
          st += v;
          st2 += v * v;
        }
      }
      s_int[static_cast<size_t>(b)] = si;
      s2_int[static_cast<size_t>(b)] = si2;
      s_tr[static_cast<size_t>(b)] = st;
      s2_tr[static_cast<size_t>(b)] = st2;
    });
    const double m = static_cast<double>(opts.samples);
    const double volk = std::pow(omega.volume(), k);
    D11Row row;
    row.n = n;
    row.delta = delta;
    const double mi = pairwise_sum(s_int) / m;
    const double mt = pairwise_sum(s_tr) / m;
    row.internal = volk * mi;
    row.transverse = volk * mt;
    row.internal_se = volk * std::sqrt(std::max(0.0, pairwise_sum(s2_int) / m - mi * mi) / m);
    row.transverse_se = volk * std::sqrt(std::max(0.0, pairwise_sum(s2_tr) / m - mt * mt) / m);
    rep.rows.push_back(row);
  }

  // reference bounds for the CSV, anchored at the first scale
  const double i0 = std::abs(rep.rows.front().internal);
  const double t0 = std::abs(rep.rows.front().transverse);
  for (auto& row : rep.rows) {
    const double dn = static_cast<double>(row.n - n_lo);
    row.bound_internal = i0 * std::exp2(-rep.eta0 * dn);
    row.bound_transverse = t0 * std::exp2(-rep.eta1 * dn);
  }

  std::vector<double> xs, ys, xi, yi;
  for (const auto& row : rep.rows) {
    const double combined = row.internal + std::abs(row.transverse);
    if (combined > 1e-15) {
      xs.push_back(row.n);
      ys.push_back(std::log2(combined));
    }
    if (row.internal > 1e-15) {
      xi.push_back(row.n);
      yi.push_back(std::log2(row.internal));
    }
  }
  if (xs.size() < 2) {
    rep.degenerate = true;
    rep.pass = true;
    return rep;
  }
  rep.combined_slope = fit_line(xs, ys).slope;
  rep.internal_slope = xi.size() >= 2 ? fit_line(xi, yi).slope : 0.0;
  rep.pass = rep.combined_slope <= -rep.eta + rep.slack;
  return rep;
}

}  // namespace uklab
