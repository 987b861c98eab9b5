#include <doctest.h>

#include <cmath>

#include "uklab/fit.hpp"
#include "uklab/grid.hpp"
#include "uklab/reference.hpp"
#include "uklab/suite.hpp"

using namespace uklab;

TEST_CASE("torus grid validation") {
  CHECK_THROWS_AS(TorusGrid(1, 100), PreconditionError);  // not a power of two
  CHECK_THROWS_AS(TorusGrid(0, 8), PreconditionError);
  const TorusGrid g(2, 16);
  CHECK(g.cells() == 256);
  CHECK(g.spacing() == doctest::Approx(1.0 / 16.0));
  CHECK(g.levels() == 4);
}

TEST_CASE("lebesgue weights are uniform") {
  const GridMeasure mu1 = build_lebesgue(TorusGrid(1, 8));
  for (double w : mu1.weights) CHECK(w == 1.0 / 8.0);
  CHECK(mu1.mass == doctest::Approx(1.0).epsilon(1e-14));

  const GridMeasure mu2 = build_lebesgue(TorusGrid(2, 4));
  for (double w : mu2.weights) CHECK(w == 1.0 / 16.0);
}

TEST_CASE("dirac is a single atom") {
  const GridMeasure mu = build_dirac(TorusGrid(1, 8));
  CHECK(mu.weights[0] == 1.0);
  for (size_t i = 1; i < mu.weights.size(); ++i) CHECK(mu.weights[i] == 0.0);
  CHECK(mu.mass == 1.0);
}

TEST_CASE("cantor construction: clusters and mass") {
  const TorusGrid g(1, 1024);
  const GridMeasure mu = build_cantor(g, 1.0 / 3.0, 4);
  CHECK(mu.mass == doctest::Approx(1.0).epsilon(1e-12));

  // 16 surviving intervals of mass 1/16: count maximal runs of nonzero cells
  int clusters = 0;
  bool in_run = false;
  for (int64_t i = 0; i < g.n; ++i) {
    const bool nz = mu.weights[static_cast<size_t>(i)] > 0.0;
    if (nz && !in_run) ++clusters;
    in_run = nz;
  }
  CHECK(clusters == 16);

  // each cluster holds 1/16 of the mass
  double run_mass = 0.0;
  std::vector<double> masses;
  for (int64_t i = 0; i <= g.n; ++i) {
    const double w = i < g.n ? mu.weights[static_cast<size_t>(i)] : 0.0;
    if (w > 0.0) {
      run_mass += w;
    } else if (run_mass > 0.0) {
      masses.push_back(run_mass);
      run_mass = 0.0;
    }
  }
  REQUIRE(masses.size() == 16);
  for (double m : masses) CHECK(m == doctest::Approx(1.0 / 16.0).epsilon(1e-10));

  CHECK_THROWS_AS(build_cantor(TorusGrid(1, 16), 1.0 / 3.0, 6), PreconditionError);
  CHECK_THROWS_AS(build_cantor(g, 0.6, 3), PreconditionError);
}

TEST_CASE("random salem: determinism and single-level structure") {
  const TorusGrid g(1, 64);
  const GridMeasure a = build_random_salem(g, 2, 4, 1, 12345);
  const GridMeasure b = build_random_salem(g, 2, 4, 1, 12345);
  CHECK(a.weights == b.weights);  // bitwise

  const GridMeasure c = build_random_salem(g, 2, 4, 1, 54321);
  CHECK(a.weights != c.weights);

  // one level, keep 2 of 4 quarters: two blocks of 16 cells with mass 1/2
  int nonzero_quarters = 0;
  for (int q = 0; q < 4; ++q) {
    double qmass = 0.0;
    for (int64_t i = q * 16; i < (q + 1) * 16; ++i) qmass += a.weights[static_cast<size_t>(i)];
    if (qmass > 1e-12) {
      ++nonzero_quarters;
      CHECK(qmass == doctest::Approx(0.5).epsilon(1e-12));
    }
  }
  CHECK(nonzero_quarters == 2);

  CHECK_THROWS_AS(build_random_salem(g, 4, 4, 1, 1), PreconditionError);
  // deep constructions with sub-cell leaves are allowed (mass aggregates)
  CHECK_NOTHROW(build_random_salem(TorusGrid(1, 256), 2, 4, 6, 7));
}

TEST_CASE("mollifier kernels: normalization and symmetry") {
  const TorusGrid g(1, 128);
  const MollifierFamily fam;
  for (int n = 0; n <= 5; ++n) {
    const MollifierKernel k = fam.sample_l1(g, n);
    double mass = 0.0;
    for (double c : k.w) mass += c;
    mass /= static_cast<double>(g.n);  // density back to mass
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    // symmetry under negation
    const int64_t side = k.side();
    for (int64_t o = 0; o < side; ++o)
      CHECK(k.w[static_cast<size_t>(o)] == k.w[static_cast<size_t>(side - 1 - o)]);
  }
  CHECK_THROWS_AS(fam.sample_l1(g, 7), PreconditionError);  // 2^-7 < 2/128

  MollifierFamily gauss;
  gauss.profile = KernelProfile::gaussian;
  const MollifierKernel k = gauss.sample_l1(g, 2);
  double mass = 0.0;
  for (double c : k.w) mass += c;
  CHECK(mass / static_cast<double>(g.n) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mollify: unit-integral kernel facts") {
  const TorusGrid g(1, 128);
  const MollifierFamily fam;

  const GridFunction one = mollify(build_lebesgue(g), 3, fam);
  for (double v : one.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

  // Dirac mollifies to the sampled kernel itself
  const GridFunction kern = mollify(build_dirac(g), 3, fam);
  const MollifierKernel k = fam.sample_l1(g, 3);
  CHECK(kern.values[0] == doctest::Approx(k.w[static_cast<size_t>(k.radius)]));
  CHECK(kern.integral() == doctest::Approx(1.0).epsilon(1e-12));

  // mass conservation for a singular measure
  const GridMeasure cantor = build_cantor(g, 1.0 / 3.0, 3);
  for (int n = 1; n <= 5; ++n)
    CHECK(mollify(cantor, n, fam).integral() == doctest::Approx(cantor.mass).epsilon(1e-10));

  // nonnegativity
  for (double v : mollify(cantor, 4, fam).values) CHECK(v >= -1e-10);

  // parallel kernel matches the serial reference twin
  const GridFunction a = mollify(cantor, 3, fam);
  const GridFunction b = ref::mollify_serial(cantor, 3, fam);
  for (size_t i = 0; i < a.values.size(); ++i)
    CHECK(a.values[i] == doctest::Approx(b.values[i]).epsilon(1e-14));
}

TEST_CASE("delta_mollify: zero integral, zero for lebesgue") {
  const TorusGrid g(1, 256);
  const MollifierFamily fam;

  const GridFunction dl = delta_mollify(build_lebesgue(g), 3, fam);
  for (double v : dl.values) CHECK(std::abs(v) < 1e-12);

  const GridMeasure salem = build_random_salem(g, 2, 4, 5, 99);
  for (int n = 2; n <= 5; ++n)
    CHECK(std::abs(delta_mollify(salem, n, fam).integral()) < 1e-10);

  CHECK_THROWS_AS(delta_mollify(salem, 7, fam), PreconditionError);  // n+1 unresolvable
}

TEST_CASE("translation covariance of mollify is bit-exact") {
  const TorusGrid g(1, 128);
  const MollifierFamily fam;
  const GridMeasure mu = build_cantor(g, 0.3, 3);
  const std::vector<int64_t> shift = {37};
  const GridFunction lhs = mollify(translate(mu, shift), 3, fam);
  const GridFunction rhs = translate(mollify(mu, 3, fam), shift);
  CHECK(lhs.values == rhs.values);  // identical floats
}

TEST_CASE("ball masses: direct oracle agreement and closed forms") {
  const TorusGrid g(1, 256);
  const GridMeasure cantor = build_cantor(g, 1.0 / 3.0, 3);
  for (double r : {1.0 / 64, 1.0 / 16, 0.25}) {
    // separable kernel path vs direct per-center oracle
    double direct_max = 0.0;
    for (int64_t c = 0; c < g.n; c += 7)
      direct_max = std::max(direct_max, ref::ball_mass_at(cantor, {c}, r));
    CHECK(ball_mass_max(cantor, r) >= direct_max - 1e-12);
  }

  // Lebesgue: exactly (2r)^d for any radius
  const GridMeasure leb2 = build_lebesgue(TorusGrid(2, 32));
  CHECK(ball_mass_max(leb2, 0.125) == doctest::Approx(0.0625).epsilon(1e-12));
}

TEST_CASE("ball condition fits: lebesgue, dirac, cantor, salem") {
  const TorusGrid g(1, 1024);

  const BallConditionFit leb = ball_condition_fit(build_lebesgue(g), dyadic_radii(g));
  CHECK(std::abs(leb.alpha - 1.0) < 0.02);

  const BallConditionFit dir = ball_condition_fit(build_dirac(g), dyadic_radii(g));
  CHECK(dir.alpha <= 0.05);

  const TorusGrid g4(1, 4096);
  const BallConditionFit can =
      ball_condition_fit(build_cantor(g4, 1.0 / 3.0, 6), power_radii(g4, 3.0));
  CHECK(std::abs(can.alpha - std::log(2.0) / std::log(3.0)) < 0.05);

  // ratio 1/4 at depth 3: radii matched to the construction levels
  const BallConditionFit quarter =
      ball_condition_fit(build_cantor(g4, 0.25, 3), {0.25, 0.0625, 0.015625});
  CHECK(std::abs(quarter.alpha - 0.5) < 0.05);

  const BallConditionFit sal =
      ball_condition_fit(build_random_salem(g4, 2, 4, 5, 7), power_radii(g4, 4.0));
  CHECK(std::abs(sal.alpha - 0.5) < 0.1);

  CHECK_THROWS_AS(ball_condition_fit(build_lebesgue(g), {0.25, 0.125}), PreconditionError);
}

TEST_CASE("lebesgue d=2 ball fit recovers alpha = 2") {
  const TorusGrid g(2, 64);
  const BallConditionFit fit = ball_condition_fit(build_lebesgue(g), dyadic_radii(g));
  CHECK(std::abs(fit.alpha - 2.0) < 0.02);
}

TEST_CASE("sup growth of cantor mollifications tracks d - alpha") {
  const TorusGrid g(1, 1024);
  const GridMeasure mu = build_cantor(g, 1.0 / 3.0, 6);
  const MollifierFamily fam;
  const double alpha = std::log(2.0) / std::log(3.0);
  std::vector<double> ns, sups;
  for (int n = 2; n <= 6; ++n) {
    ns.push_back(n);
    sups.push_back(std::log2(mollify(mu, n, fam).sup_abs()));
  }
  const double slope = fit_line(ns, sups).slope;
  CHECK(std::abs(slope - (1.0 - alpha)) < 0.15);
}

TEST_CASE("measure determinism is bitwise") {
  const TorusGrid g(1, 512);
  const GridMeasure a = build_random_salem(g, 3, 5, 4, 2024);
  const GridMeasure b = build_random_salem(g, 3, 5, 4, 2024);
  CHECK(a.weights == b.weights);
  const GridMeasure c1 = build_cantor(g, 1.0 / 3.0, 5);
  const GridMeasure c2 = build_cantor(g, 1.0 / 3.0, 5);
  CHECK(c1.weights == c2.weights);
}

TEST_CASE("grid function interpolation wraps") {
  const TorusGrid g(1, 8);
  GridFunction f = random_function(g, 5, 0.0, 1.0);
  double p = 0.0;
  CHECK(f.interpolate(&p) == f.values[0]);
  p = 7.5 / 8.0;  // midpoint between cells 7 and 0
  CHECK(f.interpolate(&p) == doctest::Approx(0.5 * (f.values[7] + f.values[0])));
  p = -1.0 / 8.0;  // negative wraps
  CHECK(f.interpolate(&p) == doctest::Approx(f.values[7]));
}
