#include "uklab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "uklab/fit.hpp"
#include "uklab/parallel.hpp"
#include "uklab/rng.hpp"

namespace uklab {

TorusGrid::TorusGrid(int d_, int64_t n_) : d(d_), n(n_) {
  if (d < 1 || d > 4) throw PreconditionError("TorusGrid: d must be in 1..4");
  if (!is_power_of_two(n)) throw PreconditionError("TorusGrid: N must be a power of two");
  if (n < 2) throw PreconditionError("TorusGrid: N must be >= 2");
  (void)indexer();  // overflow check
}

GridMeasure::GridMeasure(TorusGrid g, std::vector<double> w) : grid(g), weights(std::move(w)) {
  if (static_cast<int64_t>(weights.size()) != grid.cells())
    throw PreconditionError("GridMeasure: weight count != cell count");
  for (double x : weights) {
    if (!(x >= 0.0) || std::isnan(x)) throw PreconditionError("GridMeasure: negative or NaN weight");
  }
  recompute_mass();
}

void GridMeasure::normalize() {
  recompute_mass();
  if (mass <= 0.0) throw PreconditionError("GridMeasure: cannot normalize zero mass");
  const double inv = 1.0 / mass;
  for (double& x : weights) x *= inv;
  recompute_mass();
}

GridFunction::GridFunction(TorusGrid g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (static_cast<int64_t>(values.size()) != grid.cells())
    throw PreconditionError("GridFunction: value count != cell count");
}

GridFunction GridFunction::constant(TorusGrid g, double c) {
  return GridFunction(g, std::vector<double>(static_cast<size_t>(g.cells()), c));
}

double GridFunction::sup_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double GridFunction::lp_norm(double p) const {
  if (!(p >= 1.0)) throw PreconditionError("lp_norm: p must be >= 1");
  std::vector<double> tmp(values.size());
  for (size_t i = 0; i < values.size(); ++i) tmp[i] = std::pow(std::abs(values[i]), p);
  return std::pow(pairwise_sum(tmp) / static_cast<double>(grid.cells()), 1.0 / p);
}

double GridFunction::interpolate(const double* point) const {
  const int d = grid.d;
  const int64_t n = grid.n, mask = grid.mask();
  int64_t base[4];
  double frac[4];
  for (int a = 0; a < d; ++a) {
    const double s = point[a] * static_cast<double>(n);
    const double fl = std::floor(s);
    base[a] = static_cast<int64_t>(fl);
    frac[a] = s - fl;
  }
  double acc = 0.0;
  const int corners = 1 << d;
  for (int c = 0; c < corners; ++c) {
    double wgt = 1.0;
    int64_t flat = 0;
    for (int a = 0; a < d; ++a) {
      const int bit = (c >> a) & 1;
      wgt *= bit ? frac[a] : 1.0 - frac[a];
      flat = flat * n + ((base[a] + bit) & mask);
    }
    acc += wgt * values[static_cast<size_t>(flat)];
  }
  return acc;
}

double GridFunction::nearest(const double* point) const {
  const int d = grid.d;
  const int64_t n = grid.n, mask = grid.mask();
  int64_t flat = 0;
  for (int a = 0; a < d; ++a) {
    const double s = point[a] * static_cast<double>(n);
    const int64_t i = static_cast<int64_t>(std::floor(s + 0.5));
    flat = flat * n + (i & mask);
  }
  return values[static_cast<size_t>(flat)];
}

GridFunction to_density(const GridMeasure& mu) {
  const double scale = std::pow(static_cast<double>(mu.grid.n), mu.grid.d);
  std::vector<double> v(mu.weights.size());
  for (size_t i = 0; i < v.size(); ++i) v[i] = mu.weights[i] * scale;
  return GridFunction(mu.grid, std::move(v));
}

namespace {

template <class Vec>
Vec roll(const TorusGrid& g, const Vec& in, const std::vector<int64_t>& shift) {
  if (static_cast<int>(shift.size()) != g.d) throw PreconditionError("translate: shift size != d");
  const MultiIndexer ix = g.indexer();
  Vec out(in.size());
  int64_t idx[4];
  for (int64_t f = 0; f < ix.total; ++f) {
    ix.unflatten(f, idx);
    int64_t src[4];
    for (int a = 0; a < g.d; ++a) src[a] = (idx[a] - shift[a]) & ix.mask;
    out[static_cast<size_t>(f)] = in[static_cast<size_t>(ix.flatten(src))];
  }
  return out;
}

}  // namespace

GridMeasure translate(const GridMeasure& mu, const std::vector<int64_t>& shift) {
  return GridMeasure(mu.grid, roll(mu.grid, mu.weights, shift));
}

GridFunction translate(const GridFunction& f, const std::vector<int64_t>& shift) {
  return GridFunction(f.grid, roll(f.grid, f.values, shift));
}

// ---------------------------------------------------------------------------
// Mollifiers
// ---------------------------------------------------------------------------

int64_t MollifierKernel::taps() const {
  int64_t t = 1;
  for (int a = 0; a < d; ++a) t *= side();
  return t;
}

double MollifierFamily::profile_value(double rho) const {
  if (rho >= 0.5) return 0.0;
  switch (profile) {
    case KernelProfile::smooth_bump: {
      const double u = 2.0 * rho;
      return std::exp(-1.0 / (1.0 - u * u));
    }
    case KernelProfile::gaussian: {
      // truncated at the support edge and shifted to vanish there
      const double sigma = 1.0 / 6.0;
      const double edge = std::exp(-0.25 / (2.0 * sigma * sigma));
      return std::exp(-rho * rho / (2.0 * sigma * sigma)) - edge;
    }
  }
  return 0.0;
}

namespace {

double slope_sup_of(const MollifierFamily& fam) {
  const int m = 200000;
  double sup = 0.0;
  const double h = 0.5 / m;
  for (int i = 1; i < m; ++i) {
    const double rho = i * h;
    const double dv = (fam.profile_value(rho + h) - fam.profile_value(rho - h)) / (2.0 * h);
    sup = std::max(sup, std::abs(dv));
  }
  return sup;
}

}  // namespace

double MollifierFamily::profile_slope_sup() const {
  if (profile == KernelProfile::smooth_bump) {
    static const double v = slope_sup_of(MollifierFamily{KernelProfile::smooth_bump});
    return v;
  }
  static const double v = slope_sup_of(MollifierFamily{KernelProfile::gaussian});
  return v;
}

namespace {

MollifierKernel sample_kernel_raw(const MollifierFamily& fam, const TorusGrid& g, int n) {
  if (!fam.scale_resolvable(g, n))
    throw PreconditionError("mollifier scale too fine: need 2^-n >= 2/N (n=" + std::to_string(n) +
                            ", N=" + std::to_string(g.n) + ")");
  MollifierKernel k;
  k.d = g.d;
  k.radius = g.n >> (n + 1);  // N * 2^-(n+1)
  const int64_t side = k.side();
  int64_t taps = 1;
  for (int a = 0; a < g.d; ++a) taps *= side;
  k.w.assign(static_cast<size_t>(taps), 0.0);
  const double scale = std::ldexp(1.0, n) / static_cast<double>(g.n);  // 2^n / N
  int64_t off[4];
  for (int64_t t = 0; t < taps; ++t) {
    int64_t rem = t;
    double r2 = 0.0;
    for (int a = g.d - 1; a >= 0; --a) {
      off[a] = rem % side - k.radius;
      rem /= side;
      const double x = static_cast<double>(off[a]) * scale;
      r2 += x * x;
    }
    k.w[static_cast<size_t>(t)] = fam.profile_value(std::sqrt(r2));
  }
  return k;
}

}  // namespace

MollifierKernel MollifierFamily::sample_l1(const TorusGrid& g, int n) const {
  MollifierKernel k = sample_kernel_raw(*this, g, n);
  const double total = pairwise_sum(k.w);  // sum of masses-to-be
  if (total <= 0.0) throw PreconditionError("mollifier kernel sampled to zero");
  // store density samples: masses/total * N^d
  const double scale = std::pow(static_cast<double>(g.n), g.d) / total;
  for (double& x : k.w) x *= scale;
  return k;
}

MollifierKernel MollifierFamily::sample_derivative_normalized(const TorusGrid& g, int n) const {
  MollifierKernel k = sample_kernel_raw(*this, g, n);
  // phi_n(x) = 2^{nd} q(2^n x) with sup|q'| normalized to 1 at unit scale
  const double norm = std::ldexp(1.0, n * g.d) / profile_slope_sup();
  for (double& x : k.w) x *= norm;
  return k;
}

GridFunction convolve_measure(const GridMeasure& mu, const MollifierKernel& k) {
  const TorusGrid& g = mu.grid;
  if (k.d != g.d) throw PreconditionError("convolve_measure: kernel dimension mismatch");
  for (double w : mu.weights)
    if (std::isnan(w)) throw PreconditionError("convolve_measure: NaN in weights");
  const MultiIndexer ix = g.indexer();
  const int64_t side = k.side();
  const int64_t taps = k.taps();
  std::vector<double> out(static_cast<size_t>(ix.total), 0.0);
  parallel_for(ix.total, [&](int64_t f) {
    int64_t idx[4];
    ix.unflatten(f, idx);
    double acc = 0.0;
    for (int64_t t = 0; t < taps; ++t) {
      const double c = k.w[static_cast<size_t>(t)];
      if (c == 0.0) continue;
      int64_t rem = t;
      int64_t src[4];
      for (int a = g.d - 1; a >= 0; --a) {
        const int64_t o = rem % side - k.radius;
        rem /= side;
        src[a] = (idx[a] - o) & ix.mask;
      }
      acc += c * mu.weights[static_cast<size_t>(ix.flatten(src))];
    }
    out[static_cast<size_t>(f)] = acc;
  });
  return GridFunction(g, std::move(out));
}

GridFunction kernel_density(const TorusGrid& g, const MollifierKernel& k) {
  if (k.d != g.d) throw PreconditionError("kernel_density: kernel dimension mismatch");
  std::vector<double> v(static_cast<size_t>(g.cells()), 0.0);
  const int64_t side = k.side();
  int64_t off[4];
  for (int64_t t = 0; t < k.taps(); ++t) {
    int64_t rem = t;
    for (int a = g.d - 1; a >= 0; --a) {
      off[a] = rem % side - k.radius;
      rem /= side;
    }
    int64_t flat = 0;
    for (int a = 0; a < g.d; ++a) flat = flat * g.n + (off[a] & g.mask());
    v[static_cast<size_t>(flat)] += k.w[static_cast<size_t>(t)];
  }
  return GridFunction(g, std::move(v));
}

GridFunction mollify(const GridMeasure& mu, int n, const MollifierFamily& family) {
  return convolve_measure(mu, family.sample_l1(mu.grid, n));
}

GridFunction delta_mollify(const GridMeasure& mu, int n, const MollifierFamily& family) {
  GridFunction fine = mollify(mu, n + 1, family);
  const GridFunction coarse = mollify(mu, n, family);
  for (size_t i = 0; i < fine.values.size(); ++i) fine.values[i] -= coarse.values[i];
  return fine;
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

GridMeasure build_lebesgue(const TorusGrid& g) {
  const double w = 1.0 / std::pow(static_cast<double>(g.n), g.d);
  return GridMeasure(g, std::vector<double>(static_cast<size_t>(g.cells()), w));
}

GridMeasure build_dirac(const TorusGrid& g) {
  std::vector<double> w(static_cast<size_t>(g.cells()), 0.0);
  w[0] = 1.0;
  return GridMeasure(g, std::move(w));
}

namespace {

/// Spread `mass` uniformly over [a, a+len) onto the cells of a 1-d grid,
/// proportionally to overlap.  0 <= a, a+len <= 1.
void spread_interval(std::vector<double>& w, int64_t n, double a, double len, double mass) {
  const double nn = static_cast<double>(n);
  const double b = a + len;
  int64_t k0 = static_cast<int64_t>(std::floor(a * nn));
  int64_t k1 = static_cast<int64_t>(std::ceil(b * nn));
  if (k1 > n) k1 = n;
  if (k0 < 0) k0 = 0;
  const double density = mass / len;
  for (int64_t k = k0; k < k1; ++k) {
    const double lo = std::max(a, static_cast<double>(k) / nn);
    const double hi = std::min(b, static_cast<double>(k + 1) / nn);
    if (hi > lo) w[static_cast<size_t>(k)] += density * (hi - lo);
  }
}

struct Interval {
  double a;
  double len;
};

std::vector<double> cantor_axis_weights(int64_t n, double ratio, int depth) {
  std::vector<Interval> cur{{0.0, 1.0}};
  for (int level = 0; level < depth; ++level) {
    std::vector<Interval> next;
    next.reserve(cur.size() * 2);
    for (const Interval& iv : cur) {
      const double child = iv.len * ratio;
      next.push_back({iv.a, child});
      next.push_back({iv.a + iv.len - child, child});
    }
    cur = std::move(next);
  }
  std::vector<double> w(static_cast<size_t>(n), 0.0);
  const double mass = 1.0 / static_cast<double>(cur.size());
  for (const Interval& iv : cur) spread_interval(w, n, iv.a, iv.len, mass);
  return w;
}

std::vector<double> salem_axis_weights(int64_t n, int keep, int split, int depth, uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<Interval> cur{{0.0, 1.0}};
  std::vector<int> choices(static_cast<size_t>(split));
  for (int level = 0; level < depth; ++level) {
    std::vector<Interval> next;
    next.reserve(cur.size() * static_cast<size_t>(keep));
    for (const Interval& iv : cur) {
      for (int i = 0; i < split; ++i) choices[static_cast<size_t>(i)] = i;
      // partial Fisher-Yates: the first `keep` entries are the kept children
      for (int i = 0; i < keep; ++i) {
        const int j = i + static_cast<int>(rng.next_below(static_cast<uint64_t>(split - i)));
        std::swap(choices[static_cast<size_t>(i)], choices[static_cast<size_t>(j)]);
      }
      const double child = iv.len / static_cast<double>(split);
      for (int i = 0; i < keep; ++i)
        next.push_back({iv.a + child * choices[static_cast<size_t>(i)], child});
    }
    cur = std::move(next);
  }
  std::vector<double> w(static_cast<size_t>(n), 0.0);
  const double mass = 1.0 / static_cast<double>(cur.size());
  for (const Interval& iv : cur) spread_interval(w, n, iv.a, iv.len, mass);
  return w;
}

GridMeasure product_measure(const TorusGrid& g, const std::vector<std::vector<double>>& axis) {
  const MultiIndexer ix = g.indexer();
  std::vector<double> w(static_cast<size_t>(ix.total));
  int64_t idx[4];
  for (int64_t f = 0; f < ix.total; ++f) {
    ix.unflatten(f, idx);
    double v = 1.0;
    for (int a = 0; a < g.d; ++a) v *= axis[static_cast<size_t>(a)][static_cast<size_t>(idx[a])];
    w[static_cast<size_t>(f)] = v;
  }
  GridMeasure mu(g, std::move(w));
  mu.normalize();
  return mu;
}

}  // namespace

GridMeasure build_cantor(const TorusGrid& g, double ratio, int depth) {
  if (!(ratio > 0.0 && ratio < 0.5)) throw PreconditionError("build_cantor: ratio must be in (0, 1/2)");
  if (depth < 1 || depth > 40) throw PreconditionError("build_cantor: depth must be in 1..40");
  if (2.0 * std::pow(ratio, depth) < 1.0 / static_cast<double>(g.n))
    throw PreconditionError("build_cantor: depth unresolvable on grid (2*ratio^depth < 1/N)");
  if (depth > 22) throw PreconditionError("build_cantor: 2^depth interval budget exceeded");
  std::vector<std::vector<double>> axis(static_cast<size_t>(g.d));
  for (int a = 0; a < g.d; ++a) axis[static_cast<size_t>(a)] = cantor_axis_weights(g.n, ratio, depth);
  return product_measure(g, axis);
}

GridMeasure build_random_salem(const TorusGrid& g, int keep, int split, int depth, uint64_t seed) {
  if (keep < 1 || split < 2 || keep >= split)
    throw PreconditionError("build_random_salem: need 1 <= keep < split");
  if (depth < 1) throw PreconditionError("build_random_salem: depth must be >= 1");
  if (depth * std::log2(static_cast<double>(split)) > 50.0)
    throw PreconditionError("build_random_salem: split^depth too large");
  if (std::pow(static_cast<double>(keep), depth) > (1 << 24))
    throw PreconditionError("build_random_salem: keep^depth interval budget exceeded");
  std::vector<std::vector<double>> axis(static_cast<size_t>(g.d));
  for (int a = 0; a < g.d; ++a)
    axis[static_cast<size_t>(a)] =
        salem_axis_weights(g.n, keep, split, depth, derive_seed(seed, static_cast<uint64_t>(a)));
  return product_measure(g, axis);
}

// ---------------------------------------------------------------------------
// Ball condition
// ---------------------------------------------------------------------------

namespace {

/// Per-axis overlap coefficients of the window [-r, +r) with cells k/N.
/// Offsets run over [-R, R]; for dyadic r the caps are exactly 0 or 1.
std::vector<double> window_coeffs(int64_t n, double r, int64_t& radius_out) {
  const double nn = static_cast<double>(n);
  const int64_t R = static_cast<int64_t>(std::ceil(r * nn));
  radius_out = R;
  std::vector<double> c(static_cast<size_t>(2 * R + 1), 0.0);
  for (int64_t o = -R; o <= R; ++o) {
    const double lo = std::max(-r, static_cast<double>(o) / nn);
    const double hi = std::min(r, static_cast<double>(o + 1) / nn);
    if (hi > lo) c[static_cast<size_t>(o + R)] = (hi - lo) * nn;
  }
  return c;
}

/// Correlate `data` along one axis with the window coefficients (torus wrap).
void axis_correlate(const TorusGrid& g, std::vector<double>& data, int axis,
                    const std::vector<double>& c, int64_t radius) {
  const int64_t n = g.n, mask = g.mask();
  int64_t stride = 1;
  for (int a = g.d - 1; a > axis; --a) stride *= n;
  const int64_t lines = g.cells() / n;
  std::vector<double> next(data.size());
  parallel_for(lines, [&](int64_t line) {
    const int64_t outer = line / stride;
    const int64_t inner = line % stride;
    const int64_t base = outer * n * stride + inner;
    for (int64_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int64_t o = -radius; o <= radius; ++o) {
        const double w = c[static_cast<size_t>(o + radius)];
        if (w == 0.0) continue;
        acc += w * data[static_cast<size_t>(base + ((i + o) & mask) * stride)];
      }
      next[static_cast<size_t>(base + i * stride)] = acc;
    }
  });
  data.swap(next);
}

}  // namespace

double ball_mass_max(const GridMeasure& mu, double r) {
  const TorusGrid& g = mu.grid;
  if (!(r > 0.0 && r <= 0.25 + 1e-12))
    throw PreconditionError("ball_mass_max: radius must be in (0, 1/4]");
  int64_t radius = 0;
  const std::vector<double> c = window_coeffs(g.n, r, radius);
  std::vector<double> field = mu.weights;
  for (int a = 0; a < g.d; ++a) axis_correlate(g, field, a, c, radius);
  double m = 0.0;
  for (double v : field) m = std::max(m, v);
  return m;
}

BallConditionFit ball_condition_fit(const GridMeasure& mu, const std::vector<double>& radii) {
  if (radii.size() < 3) throw PreconditionError("ball_condition_fit: need at least 3 radii");
  const double rmin = 2.0 / static_cast<double>(mu.grid.n);
  for (double r : radii) {
    if (r < rmin - 1e-12 || r > 0.25 + 1e-12)
      throw PreconditionError("ball_condition_fit: radii must lie in [2/N, 1/4]");
  }
  BallConditionFit fit;
  fit.radii = radii;
  std::vector<double> lx, ly;
  for (double r : radii) {
    const double m = ball_mass_max(mu, r);
    fit.max_masses.push_back(m);
    if (m <= 0.0) throw PreconditionError("ball_condition_fit: zero ball mass (empty measure?)");
    lx.push_back(std::log(r));
    ly.push_back(std::log(m));
  }
  const LineFit lf = fit_line(lx, ly);
  fit.alpha = std::clamp(lf.slope, 0.0, static_cast<double>(mu.grid.d));
  fit.c_h = std::exp(lf.intercept);
  fit.residual = lf.rms;
  return fit;
}

std::vector<double> dyadic_radii(const TorusGrid& g) {
  std::vector<double> r;
  for (int m = 2; m <= g.levels() - 2; ++m) r.push_back(std::ldexp(1.0, -m));
  return r;
}

std::vector<double> power_radii(const TorusGrid& g, double base) {
  if (!(base > 1.0)) throw PreconditionError("power_radii: base must be > 1");
  std::vector<double> r;
  const double rmin = 2.0 / static_cast<double>(g.n);
  for (int m = 1; m < 64; ++m) {
    const double v = std::pow(base, -m);
    if (v > 0.25) continue;
    if (v < rmin) break;
    r.push_back(v);
  }
  return r;
}

}  // namespace uklab
