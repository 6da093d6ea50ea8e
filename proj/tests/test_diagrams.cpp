#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <set>

#include "chaoslab/diagrams.hpp"
#include "chaoslab/gauss_hermite.hpp"
#include "chaoslab/hermite.hpp"
#include "chaoslab/spectral.hpp"
#include "test_util.hpp"

using namespace chaoslab;
using diagrams::Diagram;

namespace {

std::shared_ptr<const chaos::RegularSystem> small_system(int resolution = 8) {
  const auto model = spectral::power_law_model(1, 0.5);
  const auto g = spectral::density_from_model(model, 256);
  return chaos::build_regular_system(g, resolution);
}

}  // namespace

TEST_CASE("enumeration of tiny orders") {
  CHECK(diagrams::enumerate_diagrams({1}).size() == 1);      // empty only
  CHECK(diagrams::enumerate_diagrams({1, 1}).size() == 2);   // empty + edge
  const auto d22 = diagrams::enumerate_diagrams({2, 2});
  CHECK(d22.size() == 7);  // 1 empty + 4 one-edge + 2 complete
  int complete = 0, empty = 0;
  for (const auto& d : d22) {
    if (d.complete()) ++complete;
    if (d.edge_count() == 0) ++empty;
  }
  CHECK(complete == 2);
  CHECK(empty == 1);
}

TEST_CASE("enumeration count matches brute force and the pairing formula") {
  for (int n = 1; n <= 4; ++n)
    for (int m = 1; m <= 4; ++m) {
      const auto all = diagrams::enumerate_diagrams({n, m});
      // choose matched vertices in each row and a bijection
      double formula = 0;
      for (int k = 0; k <= std::min(n, m); ++k) {
        const double ch = hermite::factorial(n) / (hermite::factorial(k) * hermite::factorial(n - k)) *
                          hermite::factorial(m) / (hermite::factorial(k) * hermite::factorial(m - k)) *
                          hermite::factorial(k);
        formula += ch;
      }
      CHECK(static_cast<double>(all.size()) == formula);
      CHECK(static_cast<long>(all.size()) == testutil::brute_force_diagram_count({n, m}));
      // no duplicates
      std::set<std::string> seen;
      for (const auto& d : all) seen.insert(d.to_text());
      CHECK(seen.size() == all.size());
    }
  CHECK(static_cast<long>(diagrams::enumerate_diagrams({2, 1, 1}).size()) ==
        testutil::brute_force_diagram_count({2, 1, 1}));
  CHECK(static_cast<long>(diagrams::enumerate_diagrams({2, 2, 2}).size()) ==
        testutil::brute_force_diagram_count({2, 2, 2}));
}

TEST_CASE("complete-diagram counts") {
  CHECK(diagrams::count_complete(2, 2) == 2);
  CHECK(diagrams::count_complete(2, 4) == 60);  // = E (x^2-1)^4
  CHECK(diagrams::count_complete(1, 2) == 1);
  CHECK(diagrams::count_complete(2, 2) == 2);
  CHECK(diagrams::count_complete(3, 2) == 6);  // m! row bijections
  for (int m = 1; m <= 3; ++m)
    CHECK(diagrams::count_complete(m, 2) == static_cast<std::int64_t>(hermite::factorial(m)));
}

TEST_CASE("size guard reports the blow-up") {
  CHECK_THROWS_AS((void)diagrams::enumerate_diagrams({9, 8}), std::invalid_argument);
}

TEST_CASE("moment_hermite against Gauss-Hermite quadrature") {
  CHECK(diagrams::moment_hermite(2, 2) == doctest::Approx(2.0));
  CHECK(diagrams::moment_hermite(2, 4) == doctest::Approx(60.0));
  const auto rule = gauss_hermite(64);
  for (int m = 1; m <= 3; ++m)
    for (int p = 2; p <= 4; p += 2) {
      if (m * p / 2 > 8) continue;
      double q = 0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        q += rule.weights[i] * std::pow(hermite::eval_hermite(m, rule.nodes[i]), p);
      CHECK(diagrams::moment_hermite(m, p) ==
            doctest::Approx(q).epsilon(1e-9));
    }
  // odd total arity vanishes
  CHECK(diagrams::moment_hermite(3, 3) == 0.0);
}

TEST_CASE("hermite covariance identity through tensor diagrams") {
  // E H_j(X) H_l(Y) = delta_jl j! r^j
  for (int j = 1; j <= 4; ++j)
    for (int l = 1; l <= 4; ++l)
      for (double r : {-0.5, 0.3, 0.9}) {
        std::vector<std::vector<double>> inner{{1.0, r}, {r, 1.0}};
        const double v = diagrams::product_expectation_tensor({j, l}, inner);
        CHECK(v == doctest::Approx(hermite::hermite_covariance(j, l, r)).epsilon(1e-12));
      }
}

TEST_CASE("is_regular") {
  // two rows: every complete diagram is regular
  for (const auto& d : diagrams::complete_diagrams({2, 2})) CHECK(diagrams::is_regular(d));
  for (const auto& d : diagrams::complete_diagrams({3, 3})) CHECK(diagrams::is_regular(d));

  // 4-cycle of rows 0-1, 1-2, 2-3, 3-0 is not regular
  Diagram cyc;
  cyc.order = {2, 2, 2, 2};
  cyc.edges = {{0, 2}, {3, 4}, {5, 6}, {7, 1}};
  CHECK(cyc.complete());
  CHECK_FALSE(diagrams::is_regular(cyc));

  // row-paired matching is regular
  Diagram reg;
  reg.order = {2, 2, 2, 2};
  reg.edges = {{0, 2}, {1, 3}, {4, 6}, {5, 7}};
  CHECK(diagrams::is_regular(reg));

  // odd row count has no regular diagram
  Diagram odd;
  odd.order = {1, 1};
  odd.edges = {{0, 1}};
  CHECK(diagrams::is_regular(odd));
  Diagram odd3;
  odd3.order = {2, 1, 1};
  odd3.edges = {{0, 2}, {1, 3}};
  CHECK_FALSE(diagrams::is_regular(odd3));
}

TEST_CASE("canonical text form is stable (golden list)") {
  const auto all = diagrams::enumerate_diagrams({2, 2});
  std::string listing;
  for (const auto& d : all) listing += d.to_text() + "\n";
  CHECK(listing ==
        "order 2 2 |\n"
        "order 2 2 | (1,2)\n"
        "order 2 2 | (1,3)\n"
        "order 2 2 | (0,2)\n"
        "order 2 2 | (0,2) (1,3)\n"
        "order 2 2 | (0,3)\n"
        "order 2 2 | (0,3) (1,2)\n");
}

TEST_CASE("contract: edge on two arity-1 kernels reproduces the scalar pairing") {
  const auto sys = small_system();
  CounterRng rng(11);
  const auto f = testutil::random_hermitian_kernel(sys, 1, rng, 1);
  const auto g = testutil::random_hermitian_kernel(sys, 1, rng, 2);
  Diagram d;
  d.order = {1, 1};
  d.edges = {{0, 1}};
  const auto s = diagrams::contract({f, g}, d);
  CHECK(s.arity() == 0);
  std::complex<double> hand = 0;
  for (int j = -sys->pairs(); j <= sys->pairs(); ++j) {
    if (j == 0) continue;
    hand += f.value(std::vector<int>{j}) * g.value(std::vector<int>{-j}) * sys->mass_of(j);
  }
  CHECK(s.raw(0).real() == doctest::Approx(hand.real()).epsilon(1e-12));
  CHECK(s.raw(0).imag() == doctest::Approx(hand.imag()).epsilon(1e-12));
  // and it equals the inner product <f, g> for Hermitian kernels
  CHECK(s.raw(0).real() == doctest::Approx(f.inner(g).real()).epsilon(1e-12));
}

TEST_CASE("contract: three kernels at order (2,1,1) with one edge vs hand sum") {
  const auto sys = small_system(4);  // 2 pairs keeps the hand sum tiny
  CounterRng rng(13);
  const auto f = testutil::random_hermitian_kernel(sys, 2, rng, 1);
  const auto g = testutil::random_hermitian_kernel(sys, 1, rng, 2);
  const auto h = testutil::random_hermitian_kernel(sys, 1, rng, 3);
  Diagram d;
  d.order = {2, 1, 1};
  d.edges = {{2, 3}};  // the two arity-1 rows joined
  const auto out = diagrams::contract({f, g, h}, d);
  CHECK(out.arity() == 2);
  const int M = sys->pairs();
  for (int a = -M; a <= M; ++a)
    for (int b = -M; b <= M; ++b) {
      if (a == 0 || b == 0) continue;
      std::complex<double> hand = 0;
      if (std::abs(a) != std::abs(b)) {
        for (int j = -M; j <= M; ++j) {
          if (j == 0) continue;
          hand += f.value(std::vector<int>{a, b}) * g.value(std::vector<int>{j}) *
                  h.value(std::vector<int>{-j}) * sys->mass_of(j);
        }
      }
      const auto got = out.value(std::vector<int>{a, b});
      CHECK(std::abs(got - hand) <= 1e-12 * (1.0 + std::abs(hand)));
    }
}

TEST_CASE("empty diagram contraction is the off-diagonal tensor product") {
  const auto sys = small_system(4);
  CounterRng rng(17);
  const auto f = testutil::random_hermitian_kernel(sys, 1, rng, 4);
  const auto g = testutil::random_hermitian_kernel(sys, 1, rng, 5);
  Diagram d;
  d.order = {1, 1};
  const auto out = diagrams::contract({f, g}, d);
  const int M = sys->pairs();
  for (int a = -M; a <= M; ++a)
    for (int b = -M; b <= M; ++b) {
      if (a == 0 || b == 0) continue;
      const auto got = out.value(std::vector<int>{a, b});
      const auto expect = f.value(std::vector<int>{a}) * g.value(std::vector<int>{b});
      CHECK(std::abs(got - expect) < 1e-14);
    }
}

TEST_CASE("norm bound and symmetrization contraction over random kernels") {
  const auto sys = small_system(8);
  CounterRng rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    const int n1 = 1 + trial % 3, n2 = 1 + (trial / 3) % 2;
    const auto f = testutil::random_hermitian_kernel(sys, n1, rng, 100 + 2 * trial);
    const auto g = testutil::random_hermitian_kernel(sys, n2, rng, 101 + 2 * trial);
    CHECK(f.sym().norm2() <= f.norm2() + 1e-12);  // ||Sym f|| <= ||f||
    const double nf = std::sqrt(f.norm2()), ng = std::sqrt(g.norm2());
    for (const auto& d : diagrams::enumerate_diagrams({n1, n2})) {
      const auto hg = diagrams::contract({f, g}, d);
      CHECK(std::sqrt(hg.norm2()) <= nf * ng + 1e-12);
    }
  }
}

TEST_CASE("product formula structure: one f x_k h expansion") {
  // diagrams of (n,1): one empty (arity n+1 term) and n one-edge terms
  for (int n = 1; n <= 4; ++n) {
    const auto all = diagrams::enumerate_diagrams({n, 1});
    int empty = 0, one_edge = 0;
    for (const auto& d : all) {
      if (d.edge_count() == 0) ++empty;
      if (d.edge_count() == 1) ++one_edge;
    }
    CHECK(empty == 1);
    CHECK(one_edge == n);
    CHECK(static_cast<int>(all.size()) == n + 1);
  }
}

TEST_CASE("product_expectation equals the Wick oracle") {
  const auto sys = small_system(8);  // 4 pairs
  CounterRng rng(23);
  const std::vector<std::vector<int>> cases{{1, 1},    {2, 2},   {2, 1, 1},
                                            {3, 1},    {2, 2, 2}, {3, 3},
                                            {2, 2, 2, 2}, {4, 4}, {3, 2, 1}};
  int tag = 500;
  for (const auto& order : cases) {
    std::vector<diagrams::GridKernel> kernels;
    for (int a : order)
      kernels.push_back(testutil::random_hermitian_kernel(sys, a, rng, tag++));
    const double lib = diagrams::product_expectation(kernels);
    const double oracle = testutil::isserlis_product_expectation(kernels);
    CHECK(std::abs(lib - oracle) <= 1e-10 * std::max(1.0, std::abs(oracle)));
  }
  // odd total arity
  std::vector<diagrams::GridKernel> odd;
  odd.push_back(testutil::random_hermitian_kernel(sys, 2, rng, 900));
  odd.push_back(testutil::random_hermitian_kernel(sys, 1, rng, 901));
  CHECK(diagrams::product_expectation(odd) == 0.0);
}
