// Benchmark: OpenMP kernels against their serial reference twins.
// Prints one line per kernel with both timings and the speedup.

#include <chrono>
#include <cstdio>
#include <functional>

#include "uklab/dyadic.hpp"
#include "uklab/fourier.hpp"
#include "uklab/gowers.hpp"
#include "uklab/grid.hpp"
#include "uklab/maximal.hpp"
#include "uklab/parallel.hpp"
#include "uklab/reference.hpp"
#include "uklab/suite.hpp"

namespace {

double time_ms(const std::function<void()>& fn, int reps = 3) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

volatile double sink;

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-28s serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main() {
  using namespace uklab;
  std::printf("threads: %d\n", max_threads());

  {
    const TorusGrid g(1, 64);
    const GridFunction f = random_function(g, 11, -1.0, 1.0);
    const double s = time_ms([&] { sink = ref::uk_integral_serial(f, 3); });
    const double p = time_ms([&] { sink = uk_integral(f, 3); });
    report("uk_integral k=3 N=64", s, p);
  }
  {
    const TorusGrid g(1, 256);
    const GridFunction f = random_function(g, 12, -1.0, 1.0);
    const double s = time_ms([&] { sink = ref::uk_integral_serial(f, 2); });
    const double p = time_ms([&] { sink = uk_integral(f, 2); });
    report("uk_integral k=2 N=256", s, p);
  }
  {
    const TorusGrid g(1, 256);
    const GridFunction f = random_function(g, 13, 0.0, 1.0);
    const GridFunction mu_n = mollify(build_cantor(g, 1.0 / 3.0, 4), 3, MollifierFamily{});
    const double s = time_ms([&] { sink = ref::restricted_maximal_serial(f, mu_n, 32).values[0]; });
    const double p = time_ms([&] { sink = restricted_maximal(f, mu_n, 32).values[0]; });
    report("restricted_maximal N=256", s, p);
  }
  {
    const TorusGrid g(1, 4096);
    const GridMeasure mu = build_cantor(g, 1.0 / 3.0, 6);
    const double s = time_ms([&] { sink = ref::mollify_serial(mu, 2, MollifierFamily{}).values[0]; });
    const double p = time_ms([&] { sink = mollify(mu, 2, MollifierFamily{}).values[0]; });
    report("mollify N=4096 n=2", s, p);
  }
  {
    const TorusGrid g(1, 256);
    const GridFunction f = random_function(g, 14, -1.0, 1.0);
    const double s = time_ms([&] { sink = ref::box_slice_direct(f, 1, {3}).real(); });
    const double p = time_ms([&] { sink = std::abs(box_marginal_spectrum(f, 1).coef[3]); });
    report("box slice j=1 N=256", s, p);
  }
  {
    const TorusGrid g(1, 64);
    const OmegaSet omega = omega_random_dyadic(g, 0.25, 3, 15);
    const double s = time_ms([&] {
      // serial Monte Carlo in one block
      SplitMix64 rng(99);
      double pts[8];
      double hits = 0;
      for (int i = 0; i < 1 << 18; ++i) {
        omega.sample_point(rng, pts);
        omega.sample_point(rng, pts + 1);
        if (in_tangency_set(pts, 2, 1, 0.05)) hits += 1;
      }
      sink = hits;
    });
    const double p =
        time_ms([&] { sink = internal_tangency_measure(omega, 0.05, 2, 1 << 18, 99).value; });
    report("tangency MC 2^18 samples", s, p);
  }
  return 0;
}
