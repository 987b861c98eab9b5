#include "uklab/gowers.hpp"

#include <algorithm>
#include <cmath>

#include "uklab/fit.hpp"
#include "uklab/fourier.hpp"
#include "uklab/parallel.hpp"

namespace uklab {

double BoxTensor::at(const int64_t* x, const int64_t* us) const {
  const MultiIndexer ix = indexer();
  int64_t idx[16];
  for (int a = 0; a < grid.d; ++a) idx[a] = x[a];
  for (int i = 0; i < order * grid.d; ++i) idx[grid.d + i] = us[i];
  return values[static_cast<size_t>(ix.flatten(idx))];
}

BoxTensor box_tensor(const GridFunction& f, int k, uint64_t memory_budget) {
  const TorusGrid& g = f.grid;
  if (k < 0 || k > 3) throw PreconditionError("box_tensor: order k must be in 0..3");
  if ((k + 1) * g.d > 4)
    throw PreconditionError("box_tensor: (k+1)*d exceeds the supported tensor rank 4");
  BoxTensor t;
  t.grid = g;
  t.order = k;
  const MultiIndexer ix = t.indexer();
  const uint64_t required = static_cast<uint64_t>(ix.total) * sizeof(double);
  if (required > memory_budget)
    throw MemoryBudgetError("box_tensor: needs " + std::to_string(required) + " bytes (budget " +
                                std::to_string(memory_budget) + ")",
                            required);
  t.values.assign(static_cast<size_t>(ix.total), 0.0);
  const int64_t mask = g.mask();
  const int corners = 1 << k;
  parallel_for(ix.total, [&](int64_t flat) {
    int64_t idx[16];
    ix.unflatten(flat, idx);
    const int64_t* x = idx;
    const int64_t* u = idx + g.d;
    double prod = 1.0;
    for (int c = 0; c < corners; ++c) {
      int64_t sf = 0;
      for (int a = 0; a < g.d; ++a) {
        int64_t coord = x[a];
        for (int i = 0; i < k; ++i)
          if ((c >> i) & 1) coord -= u[i * g.d + a];
        sf = sf * g.n + (coord & mask);
      }
      prod *= f.values[static_cast<size_t>(sf)];
    }
    t.values[static_cast<size_t>(flat)] = prod;
  });
  return t;
}

namespace {

/// out[x] = f[x] * f[(x - u) mod N] over the whole grid.
void multiply_shifted(const std::vector<double>& f, const TorusGrid& g, const int64_t* u,
                      std::vector<double>& out) {
  const int64_t n = g.n, mask = g.mask();
  if (g.d == 1) {
    const int64_t u0 = u[0];
    for (int64_t i = 0; i < n; ++i)
      out[static_cast<size_t>(i)] =
          f[static_cast<size_t>(i)] * f[static_cast<size_t>((i - u0) & mask)];
    return;
  }
  const MultiIndexer ix = g.indexer();
  int64_t idx[4];
  for (int64_t flat = 0; flat < ix.total; ++flat) {
    ix.unflatten(flat, idx);
    int64_t sf = 0;
    for (int a = 0; a < g.d; ++a) sf = sf * n + ((idx[a] - u[a]) & mask);
    out[static_cast<size_t>(flat)] =
        f[static_cast<size_t>(flat)] * f[static_cast<size_t>(sf)];
  }
}

double uk_integral_serial(const std::vector<double>& f, const TorusGrid& g, int k) {
  if (k == 0) return pairwise_sum(f) / static_cast<double>(g.cells());
  const MultiIndexer ix = g.indexer();
  std::vector<double> scratch(f.size());
  double acc = 0.0;
  int64_t u[4];
  for (int64_t uf = 0; uf < ix.total; ++uf) {
    ix.unflatten(uf, u);
    multiply_shifted(f, g, u, scratch);
    acc += uk_integral_serial(scratch, g, k - 1);
  }
  return acc / static_cast<double>(ix.total);
}

}  // namespace

double uk_integral(const GridFunction& f, int k) {
  if (k < 0 || k > 4) throw PreconditionError("uk_integral: order k must be in 0..4");
  if (k == 0) return f.integral();
  const TorusGrid& g = f.grid;
  const MultiIndexer ix = g.indexer();
  // parallel over the outermost shift; inner recursion stays serial
  const double total = block_sum(
      ix.total,
      [&](int64_t uf) {
        int64_t u[4];
        ix.unflatten(uf, u);
        std::vector<double> scratch(f.values.size());
        multiply_shifted(f.values, g, u, scratch);
        return uk_integral_serial(scratch, g, k - 1);
      },
      256);
  return total / static_cast<double>(ix.total);
}

double uk_norm(const GridFunction& f, int k) {
  if (k < 1) throw PreconditionError("uk_norm: order k must be >= 1");
  const double integral = std::max(uk_integral(f, k), 0.0);
  return std::pow(integral, std::ldexp(1.0, -k));
}

double uk_norm_spectral_u2(const GridFunction& f) {
  const Spectrum s = dft(f);
  std::vector<double> mags(s.coef.size());
  for (size_t i = 0; i < s.coef.size(); ++i) {
    const double m = std::norm(s.coef[i]);  // |c|^2
    mags[i] = m * m;
  }
  return std::pow(pairwise_sum(mags), 0.25);
}

double r_k(const RateInputs& in) {
  if (in.k < 2) throw PreconditionError("r_k: k must be >= 2");
  if (in.d < 1) throw PreconditionError("r_k: d must be >= 1");
  if (!(in.beta > 0.0 && in.beta <= static_cast<double>(in.d)))
    throw PreconditionError("r_k: beta must be in (0, d]");
  double prod = 1.0;
  for (int j = 3; j <= in.k; ++j) {
    const double pow2 = std::ldexp(1.0, 3 * j - 2);
    const double denom = pow2 - (1.0 - (j + 1.0) * in.beta / (static_cast<double>(j) * in.d));
    if (std::abs(denom) < 1e-12 * pow2)
      throw PreconditionError("r_k: bracket denominator vanishes at j=" + std::to_string(j));
    prod *= 2.0 - pow2 / denom;
  }
  return prod * (2.0 * in.beta - static_cast<double>(in.d));
}

double r_k_positive_threshold(int d, int k, double step) {
  if (!(step > 0.0)) throw PreconditionError("r_k_positive_threshold: step must be positive");
  // r_k is nondecreasing in beta, so the first positive grid point is it
  for (double beta = step; beta <= static_cast<double>(d) + step / 2; beta += step) {
    const double b = std::min(beta, static_cast<double>(d));
    if (r_k(RateInputs{b, d, k}) > 0.0) return b;
  }
  return static_cast<double>(d);
}

GowersReport prop1_decay_check(const GridMeasure& mu, int k, int n_lo, int n_hi,
                               const MollifierFamily& family, const Prop1Options& opts) {
  if (k < 2 || k > 4) throw PreconditionError("prop1_decay_check: k must be in 2..4");
  if (n_hi < n_lo) throw PreconditionError("prop1_decay_check: empty scale range");
  if (!family.scale_resolvable(mu.grid, n_hi + 1))
    throw PreconditionError("prop1_decay_check: scale n_hi+1 unresolvable on grid");

  GowersReport rep;
  rep.k = k;
  rep.slack = opts.slack;
  rep.flat_guard = opts.flat_guard;

  for (int n = n_lo; n <= n_hi; ++n) {
    rep.scales.push_back(n);
    rep.norms.push_back(uk_norm(delta_mollify(mu, n, family), k));
  }

  double max_norm = 0.0;
  for (double v : rep.norms) max_norm = std::max(max_norm, v);
  if (max_norm <= 1e-13) {
    rep.degenerate = true;
    rep.pass = true;  // nothing to decay: every band vanishes
    rep.bounds.assign(rep.norms.size(), 0.0);
    return rep;
  }

  // beta feeding r_k: minimum fitted beta_j over 1 <= j <= k-1
  if (opts.beta_override) {
    rep.beta_fit = *opts.beta_override;
  } else {
    double beta = static_cast<double>(mu.grid.d);
    for (int j = 1; j <= k - 1; ++j) {
      const int fs = opts.fit_scale >= 0
                         ? opts.fit_scale
                         : (j == 1 ? mu.grid.levels() - 2 : default_fit_scale(mu.grid, n_hi));
      const double whi = j == 1 ? static_cast<double>(mu.grid.n) / 4.0
                                : higher_order_auto_window(fs);
      const DecayFit fit = higher_order_decay_fit(mu, j, fs, 1.0, whi, opts.quantile, family);
      beta = std::min(beta, fit.beta);
    }
    rep.beta_fit = beta;
  }

  const double beta_clamped =
      std::clamp(rep.beta_fit, 1e-9, static_cast<double>(mu.grid.d));
  rep.r_k_value = r_k(RateInputs{beta_clamped, mu.grid.d, k});
  rep.predicted_slope = -rep.r_k_value * std::ldexp(1.0, -k);

  std::vector<double> xs, ys;
  for (size_t i = 0; i < rep.norms.size(); ++i) {
    if (rep.norms[i] <= 0.0) continue;
    xs.push_back(static_cast<double>(rep.scales[i]));
    ys.push_back(std::log2(rep.norms[i]));
  }
  if (xs.size() < 2) {
    rep.degenerate = true;
    rep.pass = true;
    rep.bounds.assign(rep.norms.size(), 0.0);
    return rep;
  }
  rep.slope = fit_line(xs, ys).slope;

  // anchored reference bound C 2^{predicted * n} for the CSV
  const double anchor =
      rep.norms.front() / std::exp2(rep.predicted_slope * rep.scales.front());
  for (int n : rep.scales) rep.bounds.push_back(anchor * std::exp2(rep.predicted_slope * n));

  rep.pass = rep.slope <= rep.predicted_slope + rep.slack && rep.slope <= rep.flat_guard;
  return rep;
}

}  // namespace uklab
