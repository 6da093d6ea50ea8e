#include <doctest.h>

#include <cmath>

#include "chaoslab/gauss_hermite.hpp"
#include "chaoslab/hermite.hpp"
#include "chaoslab/stats.hpp"
#include "chaoslab/tails.hpp"
#include "test_util.hpp"

using namespace chaoslab;
using namespace chaoslab::tails;

TEST_CASE("moment bounds and exact moments") {
  SUBCASE("m = N = 1") {
    const auto b = moment_bound(1, 1, 1.0);
    CHECK(b.complete_count_bound == doctest::Approx(1.0));
    CHECK(moment_exact_hermite(1, 2) == doctest::Approx(1.0));
  }
  SUBCASE("m = 2, N = 2: 60 <= C(2,2) 4 <= 7!! 4") {
    CHECK(moment_exact_hermite(2, 4) == doctest::Approx(60.0));
    const auto b = moment_bound(2, 2, 2.0);
    CHECK(b.complete_count_bound == doctest::Approx(60.0 * 4.0));
    CHECK(b.double_factorial_bound == doctest::Approx(105.0 * 4.0));
    CHECK(60.0 <= b.complete_count_bound);
    CHECK(b.complete_count_bound <= b.double_factorial_bound);
  }
  SUBCASE("exact <= bound chain for m <= 3, N <= 3") {
    for (int m = 1; m <= 3; ++m)
      for (int N = 1; N <= 3; ++N) {
        if (m * N > 8) continue;
        const double exact = moment_exact_hermite(m, 2 * N);
        const auto b = moment_bound(m, N, hermite::factorial(m));
        CHECK(exact <= b.complete_count_bound * (1 + 1e-12));
        CHECK(b.complete_count_bound <= b.double_factorial_bound * (1 + 1e-12));
      }
  }
  SUBCASE("quadrature agreement for mN <= 6") {
    const auto rule = gauss_hermite(96);
    for (int m = 1; m <= 3; ++m)
      for (int N = 1; N <= 3; ++N) {
        if (m * N > 6) continue;
        double q = 0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
          q += rule.weights[i] *
               std::pow(hermite::eval_hermite(m, rule.nodes[i]), 2 * N);
        CHECK(moment_exact_hermite(m, 2 * N) ==
              doctest::Approx(q).epsilon(1e-9));
      }
  }
}

TEST_CASE("polynomial moment check") {
  SUBCASE("P = x: Gaussian even moments") {
    std::vector<double> cov{1.0};
    for (int N = 1; N <= 3; ++N) {
      const auto r = polynomial_moment_check(
          [](std::span<const double> x) { return x[0]; }, 1, 1, cov, N);
      double dfac = 1;
      for (int t = 2 * N - 1; t > 1; t -= 2) dfac *= t;
      CHECK(r.moment == doctest::Approx(dfac).epsilon(1e-10));
      CHECK(r.holds);
    }
  }
  SUBCASE("P = x^2 - 1") {
    std::vector<double> cov{1.0};
    const auto r = polynomial_moment_check(
        [](std::span<const double> x) { return x[0] * x[0] - 1.0; }, 2, 1, cov, 2);
    CHECK(r.moment == doctest::Approx(60.0).epsilon(1e-10));
    CHECK(r.bound == doctest::Approx(60.0 * 9.0 * 4.0));
    CHECK(r.holds);
  }
  SUBCASE("P = x y with independent factors") {
    std::vector<double> cov{1.0, 0.0, 0.0, 1.0};
    const auto r = polynomial_moment_check(
        [](std::span<const double> x) { return x[0] * x[1]; }, 2, 2, cov, 2);
    CHECK(r.moment == doctest::Approx(9.0).epsilon(1e-10));
    CHECK(r.holds);
  }
  SUBCASE("correlated pair") {
    std::vector<double> cov{1.0, 0.6, 0.6, 1.0};
    const auto r = polynomial_moment_check(
        [](std::span<const double> x) { return x[0] * x[1] - 0.6; }, 2, 2, cov, 2);
    CHECK(r.holds);
  }
}

TEST_CASE("tail bound constants") {
  const auto p1 = tail_bound_params(1, 1.0);
  CHECK(p1.alpha == doctest::Approx(0.5 / std::exp(1.0)).epsilon(1e-12));
  CHECK(p1.k2 == doctest::Approx(p1.alpha / 2));
  // K2 decreases as the second moment increases
  CHECK(tail_bound_params(2, 2.0).k2 > tail_bound_params(2, 8.0).k2);
  // scaling remark: K2 depends only on (m, second moment)
  CHECK(tail_bound_params(3, 6.0).k2 == tail_bound_params(3, 6.0).k2);
  CHECK_THROWS_AS((void)tail_bound(1, 1.0, 0.1), std::domain_error);
}

TEST_CASE("empirical survival sits below the bound, slope tracks the oracle") {
  // The asymptotic power 2/m is approached from below: at MC-reachable x the
  // exact log-survival slope is 1.67 (m=1), 0.74 (m=2), 0.44 (m=3). The
  // m = 1 value lies inside [0.8,1.2]*2/m, the higher orders are compared
  // against each grid's exact slope instead.
  CounterRng rng(31);
  for (int m : {1, 2, 3}) {
    const auto tb = tail_bound_params(m, hermite::factorial(m));
    const double xmax = m == 1 ? 4.2 : (m == 2 ? 16.0 : 55.0);
    std::vector<double> grid;
    for (int i = 0; i < 10; ++i)
      grid.push_back(tb.x0 * 1.05 * std::pow(xmax / (tb.x0 * 1.05), i / 9.0));
    const auto curve = tail_empirical(m, grid, 200000, rng.sub(m), 4);
    std::vector<double> lx, ly, oy;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(curve.empirical[i] <= curve.bound[i]);
      if (curve.empirical[i] * 200000 >= 100) {
        lx.push_back(std::log(grid[i]));
        ly.push_back(std::log(-std::log(curve.empirical[i])));
        oy.push_back(std::log(-std::log(testutil::exact_hermite_survival(m, grid[i]))));
      }
    }
    const double slope = ls_slope(lx, ly);
    const double oracle = ls_slope(lx, oy);
    if (m == 1) {
      CHECK(slope >= 0.8 * 2.0);
      CHECK(slope <= 1.2 * 2.0);
    }
    CHECK(std::abs(slope - oracle) <= 0.1);
  }
}

TEST_CASE("m = 2 empirical survival matches the chi-square oracle") {
  CounterRng rng(32);
  std::vector<double> grid{5.0, 8.0, 12.0};
  const auto curve = tail_empirical(2, grid, 400000, rng, 4);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double p = testutil::chisq_centered_tail(grid[i]);
    const double se = std::sqrt(p * (1 - p) / 400000.0);
    CHECK(std::abs(curve.empirical[i] - p) <= 4 * se);
  }
}

TEST_CASE("worker count does not change the empirical curve") {
  CounterRng rng(33);
  std::vector<double> grid{5.0, 9.0};
  const auto c1 = tail_empirical(2, grid, 50000, rng, 1);
  const auto c8 = tail_empirical(2, grid, 50000, rng, 8);
  CHECK(c1.empirical == c8.empirical);
}
