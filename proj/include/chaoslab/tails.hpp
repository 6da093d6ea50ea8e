#ifndef CHAOSLAB_TAILS_HPP
#define CHAOSLAB_TAILS_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "chaoslab/rng.hpp"

namespace chaoslab {
namespace tails {

struct MomentBound {
  double complete_count_bound = 0;   // C(m,N) (sm)^N
  double double_factorial_bound = 0; // (2mN-1)!! (sm)^N
};

/// Upper bounds on E[(m! I(h))^{2N}] in terms of the second moment sm;
/// requires mN <= 8 for the exact complete-diagram count.
MomentBound moment_bound(int m, int N, double second_moment);

/// E[H_m(xi)^{2N}] via complete-diagram enumeration with unit correlations.
double moment_exact_hermite(int m, int two_n);

struct PolynomialMomentCheck {
  double moment = 0;  // E P^{2N} by multi-dimensional quadrature
  double bound = 0;   // C(m,N) (m+1)^N (E P^2)^N
  bool holds = false;
};

/// P is a polynomial in k jointly Gaussian variables with the given
/// covariance (row-major k x k); degree m <= 4, k <= 3, N <= 3.
PolynomialMomentCheck polynomial_moment_check(
    const std::function<double(std::span<const double>)>& poly, int degree, int k,
    const std::vector<double>& covariance, int N);

struct TailBound {
  double k2 = 0;     // exponent constant, bound = exp(-k2 x^{2/m})
  double alpha = 0;  // the largest a with (2a)^m sm <= 1/e
  double x0 = 0;     // bound claimed for x > x0
};

TailBound tail_bound_params(int m, double second_moment);
double tail_bound(int m, double second_moment, double x);

struct SurvivalCurve {
  std::vector<double> x;
  std::vector<double> empirical;  // P(|H_m(xi)| > x)
  std::vector<double> bound;
};

/// MC survival function of |H_m(xi)| for standard Gaussian xi.
SurvivalCurve tail_empirical(int m, const std::vector<double>& x_grid,
                             std::int64_t replicates, const CounterRng& rng,
                             int workers = 1);

}  // namespace tails
}  // namespace chaoslab

#endif
