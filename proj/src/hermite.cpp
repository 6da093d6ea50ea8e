#include "chaoslab/hermite.hpp"

#include <cmath>
#include <stdexcept>

#include "chaoslab/gauss_hermite.hpp"

namespace chaoslab {
namespace hermite {

double eval_hermite(int n, double x) {
  if (n < 0) throw std::invalid_argument("eval_hermite: negative order");
  double hm1 = 0.0, h = 1.0;  // H_{-1}, H_0
  for (int k = 1; k <= n; ++k) {
    const double next = x * h - (k - 1) * hm1;
    hm1 = h;
    h = next;
  }
  return h;
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

HermiteExpansion HermiteExpansion::centered() const {
  HermiteExpansion e = *this;
  if (!e.coeffs.empty()) e.coeffs[0] = 0.0;
  return e;
}

double HermiteExpansion::operator()(double x) const {
  // Clenshaw-style accumulation via the explicit recursion
  double acc = 0.0, hm1 = 0.0, h = 1.0;
  for (int j = 0; j < static_cast<int>(coeffs.size()); ++j) {
    if (j > 0) {
      const double next = x * h - (j - 1) * hm1;
      hm1 = h;
      h = next;
    }
    acc += coeffs[j] * h;
  }
  return acc;
}

HermiteExpansion pure(int k) {
  if (k < 1) throw std::invalid_argument("hermite::pure: order must be >= 1");
  HermiteExpansion e;
  e.coeffs.assign(k + 1, 0.0);
  e.coeffs[k] = 1.0;
  e.rank = k;
  e.second_moment = factorial(k);
  return e;
}

HermiteExpansion expand_function(const std::function<double(double)>& f,
                                 int max_order, int quad_points) {
  if (max_order < 1) throw std::invalid_argument("expand_function: max_order >= 1");
  if (quad_points <= 0) quad_points = 2 * max_order + 24;
  const GaussHermiteRule rule = gauss_hermite(quad_points);

  HermiteExpansion e;
  e.coeffs.assign(max_order + 1, 0.0);
  const int q = static_cast<int>(rule.nodes.size());
  std::vector<double> fx(q);
  for (int i = 0; i < q; ++i) fx[i] = f(rule.nodes[i]);
  for (int j = 0; j <= max_order; ++j) {
    double s = 0;
    for (int i = 0; i < q; ++i)
      s += rule.weights[i] * fx[i] * eval_hermite(j, rule.nodes[i]);
    e.coeffs[j] = s / factorial(j);
  }

  double abs_sum = 0;
  for (double c : e.coeffs) abs_sum += std::abs(c);
  const double tol = 1e-10 * std::max(1.0, abs_sum);
  e.rank = 0;
  for (int j = 1; j <= max_order; ++j) {
    if (std::abs(e.coeffs[j]) > tol) {
      e.rank = j;
      break;
    }
    e.coeffs[j] = 0.0;  // below the quadrature noise floor
  }
  for (int j = 1; j <= max_order; ++j)
    e.second_moment += e.coeffs[j] * e.coeffs[j] * factorial(j);

  // The expansion has stabilized when the top three orders carry a
  // negligible share of the second moment.
  double tail = 0;
  for (int j = std::max(1, max_order - 2); j <= max_order; ++j)
    tail += e.coeffs[j] * e.coeffs[j] * factorial(j);
  e.truncation_residual = tail;
  e.truncation_warning = tail > 1e-6 * std::max(e.second_moment, 1e-300);
  return e;
}

double hermite_covariance(int j, int l, double r) {
  if (std::abs(r) > 1.0 + 1e-12)
    throw std::invalid_argument("hermite_covariance: |r| must be <= 1");
  if (j != l) return 0.0;
  return factorial(j) * std::pow(r, j);
}

}  // namespace hermite
}  // namespace chaoslab
