#include <doctest.h>

#include <cmath>

#include "uklab/gowers.hpp"
#include "uklab/grid.hpp"
#include "uklab/reference.hpp"
#include "uklab/rng.hpp"
#include "uklab/suite.hpp"

using namespace uklab;

TEST_CASE("box tensor trivial values") {
  const TorusGrid g(1, 8);
  const BoxTensor ones = box_tensor(GridFunction::constant(g, 1.0), 2);
  for (double v : ones.values) CHECK(v == 1.0);

  const BoxTensor c3 = box_tensor(GridFunction::constant(g, 1.5), 3);
  for (double v : c3.values) CHECK(v == doctest::Approx(std::pow(1.5, 8)).epsilon(1e-13));

  // k = 0 reduces to the function itself
  const GridFunction f = random_function(g, 3, -1.0, 1.0);
  const BoxTensor t0 = box_tensor(f, 0);
  CHECK(t0.values == f.values);
}

TEST_CASE("box tensor recursion equals direct product at random indices") {
  const TorusGrid g(1, 16);
  const GridFunction f = random_function(g, 5, -1.0, 1.0);
  const BoxTensor t2 = box_tensor(f, 2);
  const BoxTensor t1 = box_tensor(f, 1);
  SplitMix64 rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const int64_t x = static_cast<int64_t>(rng.next_below(16));
    const int64_t u1 = static_cast<int64_t>(rng.next_below(16));
    const int64_t u2 = static_cast<int64_t>(rng.next_below(16));
    // Delta^2 f(x; u1, u2) = Delta^1 f(x - u2; u1) * Delta^1 f(x; u1)
    const int64_t xs = (x - u2) & 15;
    const int64_t us[2] = {u1, u2};
    const double lhs = t2.at(&x, us);
    const double rhs = t1.at(&xs, &u1) * t1.at(&x, &u1);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("box tensor is symmetric in the u slots") {
  const TorusGrid g(1, 8);
  const GridFunction f = random_function(g, 9, 0.0, 2.0);
  const BoxTensor t = box_tensor(f, 3);
  SplitMix64 rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    const int64_t x = static_cast<int64_t>(rng.next_below(8));
    int64_t u[3];
    for (auto& v : u) v = static_cast<int64_t>(rng.next_below(8));
    int64_t perm[3] = {u[1], u[2], u[0]};
    CHECK(t.at(&x, u) == doctest::Approx(t.at(&x, perm)).epsilon(1e-12));
    int64_t swap01[3] = {u[1], u[0], u[2]};
    CHECK(t.at(&x, u) == doctest::Approx(t.at(&x, swap01)).epsilon(1e-12));
  }
}

TEST_CASE("uk integral: streaming, serial reference, and direct oracle agree") {
  const TorusGrid g(1, 16);
  const GridFunction f = random_function(g, 13, -1.0, 1.0);
  for (int k : {1, 2, 3}) {
    const double direct = ref::uk_integral_direct(f, k);
    const double serial = ref::uk_integral_serial(f, k);
    const double streaming = uk_integral(f, k);
    CHECK(streaming == doctest::Approx(direct).epsilon(1e-11));
    CHECK(serial == doctest::Approx(direct).epsilon(1e-11));
  }
}

TEST_CASE("uk norms: constants and the U^1 identity") {
  const TorusGrid g(1, 64);
  const GridFunction one = GridFunction::constant(g, 1.0);
  for (int k : {1, 2, 3}) CHECK(uk_norm(one, k) == doctest::Approx(1.0).epsilon(1e-12));

  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    const GridFunction f = random_function(g, seed, -1.0, 1.0);
    CHECK(uk_norm(f, 1) == doctest::Approx(std::abs(f.integral())).epsilon(1e-10));
  }
}

TEST_CASE("U^2 equals the spectral oracle") {
  const TorusGrid g(1, 64);
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const GridFunction f = random_function(g, 101 + seed, -1.0, 1.0);
    const double direct = uk_norm(f, 2);
    const double spectral = uk_norm_spectral_u2(f);
    CHECK(std::abs(direct - spectral) <= 1e-8 * std::max(1.0, spectral));
  }
  // cos(2 pi x): two coefficients of modulus 1/2 -> (2 (1/2)^4)^{1/4}
  std::vector<double> v(static_cast<size_t>(g.n));
  for (int64_t i = 0; i < g.n; ++i)
    v[static_cast<size_t>(i)] =
        std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(g.n));
  const double expected = std::pow(0.125, 0.25);
  CHECK(uk_norm_spectral_u2(GridFunction(g, v)) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("uk norm invariances") {
  const TorusGrid g(1, 32);
  const GridFunction f = random_function(g, 77, -1.0, 1.0);

  // translation invariance (to roundoff: the sums are reordered)
  const GridFunction shifted = translate(f, {11});
  for (int k : {1, 2, 3})
    CHECK(uk_norm(shifted, k) == doctest::Approx(uk_norm(f, k)).epsilon(1e-12));

  // homogeneity |c| f
  GridFunction scaled = f;
  for (double& v : scaled.values) v *= -2.5;
  for (int k : {1, 2, 3})
    CHECK(uk_norm(scaled, k) == doctest::Approx(2.5 * uk_norm(f, k)).epsilon(1e-10));
}

TEST_CASE("gowers nesting U1 <= U2 <= U3") {
  const TorusGrid g(1, 64);
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const GridFunction f = random_function(g, 500 + seed, -1.0, 1.0);
    const double u1 = uk_norm(f, 1);
    const double u2 = uk_norm(f, 2);
    const double u3 = uk_norm(f, 3);
    CHECK(u1 <= u2 + 1e-9);
    CHECK(u2 <= u3 + 1e-9);
  }
}

TEST_CASE("r_k closed forms") {
  CHECK(r_k({0.75, 1, 2}) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(r_k({0.4, 1, 2}) == doctest::Approx(-0.2).epsilon(1e-13));
  // k=3, beta=d=1: bracket = 2 - 128/(128 + 1/3) = 2 - 384/385
  const double expected = 2.0 - 384.0 / 385.0;
  CHECK(std::abs(r_k({1.0, 1, 3}) - expected) < 1e-12);
  CHECK_THROWS_AS(r_k({0.5, 1, 1}), PreconditionError);
  CHECK_THROWS_AS(r_k({1.5, 1, 2}), PreconditionError);
}

TEST_CASE("r_3 is nondecreasing in beta near d") {
  double prev = -1e300;
  for (int i = 0; i <= 10; ++i) {
    const double beta = 0.9 + 0.01 * i;
    const double v = r_k({beta, 1, 3});
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
}

TEST_CASE("smallest beta with positive rate is reported, not assumed") {
  // r_2 > 0 exactly above beta = d/2
  const double t2 = r_k_positive_threshold(1, 2);
  CHECK(std::abs(t2 - 0.5) <= 2e-3);
  CHECK(r_k({t2, 1, 2}) > 0.0);

  const double t3 = r_k_positive_threshold(1, 3);
  CHECK(t3 > 0.4);
  CHECK(t3 < 1.0);
  CHECK(r_k({t3, 1, 3}) > 0.0);
  CHECK(r_k({t3 - 0.002, 1, 3}) <= 0.0);
}

TEST_CASE("box tensor memory budget error reports the required bytes") {
  const TorusGrid g(1, 64);
  const GridFunction f = random_function(g, 11, -1.0, 1.0);
  try {
    box_tensor(f, 3, 4096);
    FAIL("expected MemoryBudgetError");
  } catch (const MemoryBudgetError& e) {
    CHECK(e.required_bytes == 64ull * 64 * 64 * 64 * 8);
  }
}

TEST_CASE("prop1: lebesgue degenerates, dirac fails") {
  const TorusGrid g(1, 128);
  const MollifierFamily fam;

  const GowersReport leb = prop1_decay_check(build_lebesgue(g), 2, 2, 4, fam);
  CHECK(leb.degenerate);
  CHECK(leb.pass);

  const GowersReport dir = prop1_decay_check(build_dirac(g), 2, 2, 4, fam);
  CHECK(!dir.degenerate);
  CHECK(dir.slope >= 0.0);
  CHECK(!dir.pass);
}

TEST_CASE("prop1: salem band norms satisfy the rate inequality") {
  const TorusGrid g(1, 256);
  const GridMeasure mu = build_random_salem(g, 2, 4, 6, 7);
  const GowersReport rep = prop1_decay_check(mu, 2, 2, 5, MollifierFamily{});
  CHECK(!rep.degenerate);
  CHECK(rep.slope <= rep.predicted_slope + rep.slack);
}
