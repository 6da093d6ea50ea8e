#include "chaoslab/tails.hpp"

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>

#include "chaoslab/diagrams.hpp"
#include "chaoslab/gauss_hermite.hpp"
#include "chaoslab/hermite.hpp"
#include "chaoslab/parallel.hpp"

namespace chaoslab {
namespace tails {

MomentBound moment_bound(int m, int N, double second_moment) {
  if (m < 1 || N < 1) throw std::invalid_argument("moment_bound: m, N >= 1");
  if (m * N > 8)
    throw std::invalid_argument("moment_bound: mN <= 8 for exact enumeration");
  MomentBound out;
  const double c = static_cast<double>(diagrams::count_complete(m, 2 * N));
  double dfac = 1;
  for (int t = 2 * m * N - 1; t > 1; t -= 2) dfac *= t;
  out.complete_count_bound = c * std::pow(second_moment, N);
  out.double_factorial_bound = dfac * std::pow(second_moment, N);
  return out;
}

double moment_exact_hermite(int m, int two_n) {
  if (two_n % 2 != 0) throw std::invalid_argument("moment_exact_hermite: power must be even");
  if (m * two_n / 2 > 8)
    throw std::invalid_argument("moment_exact_hermite: mN <= 8 for exact enumeration");
  return diagrams::moment_hermite(m, two_n, 1.0);
}

PolynomialMomentCheck polynomial_moment_check(
    const std::function<double(std::span<const double>)>& poly, int degree, int k,
    const std::vector<double>& covariance, int N) {
  if (degree < 1 || degree > 4 || k < 1 || k > 3 || N < 1 || N > 3)
    throw std::invalid_argument("polynomial_moment_check: degree <= 4, k <= 3, N <= 3");
  if (static_cast<int>(covariance.size()) != k * k)
    throw std::invalid_argument("polynomial_moment_check: covariance must be k x k");

  // lower Cholesky factor of the covariance
  std::vector<double> ell(covariance);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = ell[static_cast<std::size_t>(i) * k + j];
      for (int t = 0; t < j; ++t)
        s -= ell[static_cast<std::size_t>(i) * k + t] * ell[static_cast<std::size_t>(j) * k + t];
      if (i == j) {
        if (s <= 0) throw std::invalid_argument("polynomial_moment_check: covariance not PD");
        ell[static_cast<std::size_t>(i) * k + j] = std::sqrt(s);
      } else {
        ell[static_cast<std::size_t>(i) * k + j] = s / ell[static_cast<std::size_t>(j) * k + j];
      }
    }
    for (int j = i + 1; j < k; ++j) ell[static_cast<std::size_t>(i) * k + j] = 0;
  }

  // P^{2N} has degree <= 2 N degree <= 24; 16 nodes per axis suffice
  const auto rule = gauss_hermite(2 * N * degree / 2 + 8);
  const int q = static_cast<int>(rule.nodes.size());
  std::vector<double> xi(k), z(k);
  double m2 = 0, m2n = 0;
  std::vector<int> idx(k, 0);
  while (true) {
    double w = 1;
    for (int a = 0; a < k; ++a) {
      z[a] = rule.nodes[idx[a]];
      w *= rule.weights[idx[a]];
    }
    for (int a = 0; a < k; ++a) {
      double s = 0;
      for (int b = 0; b <= a; ++b) s += ell[static_cast<std::size_t>(a) * k + b] * z[b];
      xi[a] = s;
    }
    const double p = poly(xi);
    m2 += w * p * p;
    m2n += w * std::pow(p * p, N);
    int a = k - 1;
    while (a >= 0 && ++idx[a] == q) idx[a--] = 0;
    if (a < 0) break;
  }

  PolynomialMomentCheck out;
  out.moment = m2n;
  const double c = static_cast<double>(diagrams::count_complete(degree, 2 * N));
  out.bound = c * std::pow(degree + 1.0, N) * std::pow(m2, N);
  out.holds = out.moment <= out.bound * (1.0 + 1e-12);
  return out;
}

TailBound tail_bound_params(int m, double second_moment) {
  if (m < 1 || second_moment <= 0)
    throw std::invalid_argument("tail_bound_params: m >= 1, second moment > 0");
  TailBound out;
  out.alpha = 0.5 * std::pow(1.0 / (std::exp(1.0) * second_moment), 1.0 / m);
  out.k2 = out.alpha / 2.0;
  out.x0 = std::pow(1.0 / out.alpha, m / 2.0);
  return out;
}

double tail_bound(int m, double second_moment, double x) {
  const TailBound p = tail_bound_params(m, second_moment);
  if (x <= p.x0)
    throw std::domain_error("tail_bound: bound not claimed for x <= x0");
  return std::exp(-p.k2 * std::pow(x, 2.0 / m));
}

SurvivalCurve tail_empirical(int m, const std::vector<double>& x_grid,
                             std::int64_t replicates, const CounterRng& rng,
                             int workers) {
  if (replicates < 1) throw std::invalid_argument("tail_empirical: need replicates");
  SurvivalCurve out;
  out.x = x_grid;
  out.empirical.assign(x_grid.size(), 0.0);
  const TailBound p = tail_bound_params(m, hermite::factorial(m));
  for (double x : x_grid)
    out.bound.push_back(x > p.x0 ? std::exp(-p.k2 * std::pow(x, 2.0 / m)) : 1.0);

  // blocked counting so that worker scheduling cannot affect the result
  const int nblocks = 256;
  const std::int64_t per = (replicates + nblocks - 1) / nblocks;
  std::vector<std::vector<std::int64_t>> counts(
      nblocks, std::vector<std::int64_t>(x_grid.size(), 0));
  parallel_for_replicates(nblocks, workers, [&](int blk) {
    const std::int64_t lo = static_cast<std::int64_t>(blk) * per;
    const std::int64_t hi = std::min<std::int64_t>(replicates, lo + per);
    auto& my = counts[blk];
    for (std::int64_t i = lo; i < hi; ++i) {
      const double xi = rng.normal(7, static_cast<std::uint64_t>(i), 0);
      const double v = std::abs(hermite::eval_hermite(m, xi));
      for (std::size_t g = 0; g < x_grid.size(); ++g)
        if (v > x_grid[g]) ++my[g];
    }
  });
  for (int b = 0; b < nblocks; ++b)
    for (std::size_t g = 0; g < x_grid.size(); ++g)
      out.empirical[g] += static_cast<double>(counts[b][g]);
  for (double& e : out.empirical) e /= static_cast<double>(replicates);
  return out;
}

}  // namespace tails
}  // namespace chaoslab
