#include "uklab/dyadic.hpp"

#include <algorithm>
#include <cmath>

#include "uklab/parallel.hpp"
#include "uklab/rng.hpp"

namespace uklab {

GridFunction conditional_expectation(const GridFunction& f, DyadicLevel s) {
  const TorusGrid& g = f.grid;
  s.check_resolvable(g);
  const int64_t side = g.n >> s.s;        // cells per cube edge (power of two)
  const int64_t cubes_per_axis = g.n / side;
  const MultiIndexer cix(g.d, cubes_per_axis);
  int64_t cube_cells = 1;
  for (int a = 0; a < g.d; ++a) cube_cells *= side;

  std::vector<double> out(f.values.size());
  parallel_for(cix.total, [&](int64_t cf) {
    int64_t cube[4];
    cix.unflatten(cf, cube);
    std::vector<double> scratch(static_cast<size_t>(cube_cells));
    // walk the cube cells in row-major order
    int64_t within[4] = {0, 0, 0, 0};
    for (int64_t c = 0; c < cube_cells; ++c) {
      int64_t flat = 0;
      for (int a = 0; a < g.d; ++a) flat = flat * g.n + cube[a] * side + within[a];
      scratch[static_cast<size_t>(c)] = f.values[static_cast<size_t>(flat)];
      for (int a = g.d - 1; a >= 0; --a) {
        if (++within[a] < side) break;
        within[a] = 0;
      }
    }
    const double avg = pairwise_sum(scratch) / static_cast<double>(cube_cells);
    for (int a = 0; a < g.d; ++a) within[a] = 0;
    for (int64_t c = 0; c < cube_cells; ++c) {
      int64_t flat = 0;
      for (int a = 0; a < g.d; ++a) flat = flat * g.n + cube[a] * side + within[a];
      out[static_cast<size_t>(flat)] = avg;
      for (int a = g.d - 1; a >= 0; --a) {
        if (++within[a] < side) break;
        within[a] = 0;
      }
    }
  });
  return GridFunction(g, std::move(out));
}

GridFunction martingale_difference(const GridFunction& f, int k) {
  GridFunction fine = conditional_expectation(f, DyadicLevel(k + 1));
  const GridFunction coarse = conditional_expectation(f, DyadicLevel(k));
  for (size_t i = 0; i < fine.values.size(); ++i) fine.values[i] -= coarse.values[i];
  return fine;
}

namespace {

/// Circular box sum along one axis: out[i] = sum_{|o| <= h} in[i+o].
void box_sum_axis(const TorusGrid& g, const std::vector<double>& in, std::vector<double>& out,
                  int axis, int64_t h) {
  const int64_t n = g.n;
  int64_t stride = 1;
  for (int a = g.d - 1; a > axis; --a) stride *= n;
  const int64_t lines = g.cells() / n;
  parallel_for(lines, [&](int64_t line) {
    const int64_t outer = line / stride;
    const int64_t inner = line % stride;
    const int64_t base = outer * n * stride + inner;
    // prefix sums of the line (unwrapped twice is unnecessary: use total)
    std::vector<double> pre(static_cast<size_t>(n + 1), 0.0);
    for (int64_t i = 0; i < n; ++i)
      pre[static_cast<size_t>(i + 1)] =
          pre[static_cast<size_t>(i)] + in[static_cast<size_t>(base + i * stride)];
    const double total = pre[static_cast<size_t>(n)];
    for (int64_t i = 0; i < n; ++i) {
      int64_t lo = i - h, hi = i + h + 1;  // [lo, hi)
      double s;
      if (hi - lo >= n) {
        s = total;
      } else {
        // wrap the window into [0, n)
        lo = ((lo % n) + n) % n;
        hi = ((hi % n) + n) % n;
        if (lo < hi)
          s = pre[static_cast<size_t>(hi)] - pre[static_cast<size_t>(lo)];
        else
          s = total - (pre[static_cast<size_t>(lo)] - pre[static_cast<size_t>(hi)]);
      }
      out[static_cast<size_t>(base + i * stride)] = s;
    }
  });
}

}  // namespace

GridFunction hl_maximal(const GridFunction& f) {
  const TorusGrid& g = f.grid;
  std::vector<double> absf(f.values.size());
  for (size_t i = 0; i < absf.size(); ++i) absf[i] = std::abs(f.values[i]);

  std::vector<double> best(f.values.size(), 0.0);
  std::vector<double> cur(f.values.size());
  std::vector<double> tmp(f.values.size());
  const int levels = g.levels();
  for (int m = 0; m <= levels; ++m) {
    const int64_t h = (g.n >> m) - 1;  // window half-width in cells
    cur = absf;
    if (h > 0) {
      for (int a = 0; a < g.d; ++a) {
        box_sum_axis(g, cur, tmp, a, h);
        cur.swap(tmp);
      }
    }
    double cells = 1.0;
    for (int a = 0; a < g.d; ++a) cells *= static_cast<double>(std::min(2 * h + 1, g.n));
    const double inv = 1.0 / cells;
    for (size_t i = 0; i < cur.size(); ++i) best[i] = std::max(best[i], cur[i] * inv);
  }
  return GridFunction(g, std::move(best));
}

Scale1Report scale1_check(const GridFunction& f, const GridMeasure& mu, int s, double r,
                          int x_samples, uint64_t seed) {
  const TorusGrid& g = f.grid;
  if (!(r > 0.0 && r <= 1.0)) throw PreconditionError("scale1_check: r must be in (0, 1]");
  if (mu.grid != g) throw PreconditionError("scale1_check: grid mismatch");
  const GridFunction ef = conditional_expectation(f, DyadicLevel(s));
  const GridFunction fstar = hl_maximal(f);
  const double five_d = std::pow(5.0, g.d);

  Scale1Report rep;
  rep.r = r;
  rep.s = s;
  SplitMix64 rng(seed);
  const MultiIndexer ix = g.indexer();
  const int64_t cells = ix.total;
  for (int xs = 0; xs < x_samples; ++xs) {
    const int64_t xf = static_cast<int64_t>(rng.next_below(static_cast<uint64_t>(cells)));
    int64_t xi[4];
    ix.unflatten(xf, xi);
    double xpt[4];
    for (int a = 0; a < g.d; ++a) xpt[a] = static_cast<double>(xi[a]) / static_cast<double>(g.n);

    double lhs = 0.0;
    int64_t yi[4];
    for (int64_t yf = 0; yf < cells; ++yf) {
      const double w = mu.weights[static_cast<size_t>(yf)];
      if (w == 0.0) continue;
      ix.unflatten(yf, yi);
      double p[4];
      for (int a = 0; a < g.d; ++a)
        p[a] = xpt[a] + r * static_cast<double>(yi[a]) / static_cast<double>(g.n);
      lhs += w * ef.interpolate(p);
    }
    lhs = std::abs(lhs);
    const double rhs = five_d * fstar.values[static_cast<size_t>(xf)];
    rep.samples.push_back({lhs, rhs});
    const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? 1e300 : 0.0);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    if (lhs > rhs * (1.0 + 1e-12) + 1e-15) ++rep.violations;
  }
  return rep;
}

Scale2Report lipschitz_bound_check(const GridMeasure& mu, int k, int s, double c,
                                   const MollifierFamily& family, int num_pairs, uint64_t seed) {
  const TorusGrid& g = mu.grid;
  if (g.d != 1) throw PreconditionError("lipschitz_bound_check: stated for d = 1");
  if (!(c > 0.0)) throw PreconditionError("lipschitz_bound_check: c must be positive");
  if (static_cast<double>(k) > c * std::sqrt(static_cast<double>(s)))
    throw PreconditionError("lipschitz_bound_check: hypothesis k <= c sqrt(s) violated");

  const GridFunction muk = convolve_measure(mu, family.sample_derivative_normalized(g, k));
  const double bound = std::exp2(-(static_cast<double>(s) - 2.0 * c * std::sqrt(static_cast<double>(s))));

  Scale2Report rep;
  rep.bound = bound;
  rep.pairs = num_pairs;
  rep.profile_slope = 1.0;  // by construction of the derivative-normalized kernel

  SplitMix64 rng(seed);
  const double step = std::exp2(static_cast<double>(-s));
  const int64_t n = g.n;
  for (int i = 0; i < num_pairs; ++i) {
    const double x = rng.next_double();
    const double t = 1.0 + rng.next_double();  // t(x) in [1,2)
    const double y1 = rng.next_double();
    const double y2 = y1 + (2.0 * rng.next_double() - 1.0) * step;
    const double a1 = (y1 - x) / t;
    const double a2 = (y2 - x) / t;
    double sup = 0.0;
    for (int64_t z = 0; z < n; ++z) {
      const double zp = static_cast<double>(z) / static_cast<double>(n);
      double p1 = a1 - zp, p2 = a2 - zp;
      const double diff = std::abs(muk.interpolate(&p1) - muk.interpolate(&p2));
      sup = std::max(sup, diff);
    }
    rep.samples.push_back({sup, bound});
    rep.max_ratio = std::max(rep.max_ratio, sup / bound);
  }
  return rep;
}

Scale3Report scale3_check(const GridFunction& f, const GridMeasure& mu, int k, int s, double c,
                          double p, const MollifierFamily& family, int t_samples) {
  const TorusGrid& g = f.grid;
  if (g.d != 1) throw PreconditionError("scale3_check: stated for d = 1");
  if (static_cast<double>(k) > c * std::sqrt(static_cast<double>(s)))
    throw PreconditionError("scale3_check: hypothesis k <= c sqrt(s) violated");
  if (t_samples < 2) throw PreconditionError("scale3_check: need at least 2 t samples");
  DyadicLevel(s).check_resolvable(g);

  // project to E_s f = 0 and record the subtraction
  const GridFunction es = conditional_expectation(f, DyadicLevel(s));
  GridFunction f0 = f;
  for (size_t i = 0; i < f0.values.size(); ++i) f0.values[i] -= es.values[i];

  const GridFunction kern = convolve_measure(mu, family.sample_derivative_normalized(g, k));
  const int64_t n = g.n;
  const double invn = 1.0 / static_cast<double>(n);

  std::vector<double> mf(static_cast<size_t>(n), 0.0);
  parallel_for(n, [&](int64_t xi) {
    const double x = static_cast<double>(xi) * invn;
    double best = 0.0;
    for (int ti = 0; ti < t_samples; ++ti) {
      const double t = 1.0 + static_cast<double>(ti) / (t_samples - 1);
      double acc = 0.0;
      for (int64_t zi = 0; zi < n; ++zi) {
        const double fz = f0.values[static_cast<size_t>(zi)];
        if (fz == 0.0) continue;
        double arg = (static_cast<double>(zi) * invn - x) / t;
        acc += fz * kern.interpolate(&arg);
      }
      best = std::max(best, std::abs(acc) / t);
    }
    mf[static_cast<size_t>(xi)] = best * invn;
  });

  Scale3Report rep;
  rep.p = p;
  rep.bound = std::exp2(-(static_cast<double>(s) - 2.0 * c * std::sqrt(static_cast<double>(s))));
  rep.projection_norm = es.lp_norm(2.0);
  rep.mf_norm = GridFunction(g, mf).lp_norm(p);
  rep.f_norm = f0.lp_norm(p);
  rep.ratio = rep.f_norm > 0.0 ? rep.mf_norm / (rep.bound * rep.f_norm) : 0.0;
  return rep;
}

}  // namespace uklab
