#ifndef CHAOSLAB_HERMITE_HPP
#define CHAOSLAB_HERMITE_HPP

#include <functional>
#include <vector>

namespace chaoslab {
namespace hermite {

/// H_n(x) with leading coefficient 1 (probabilists' normalization),
/// by the three-term recursion H_n = x H_{n-1} - (n-1) H_{n-2}.
double eval_hermite(int n, double x);

/// Orthogonal expansion H(x) = sum_j c_j H_j(x) of a function that is
/// square integrable against the standard Gaussian weight.
struct HermiteExpansion {
  std::vector<double> coeffs;    // c_0..c_J
  int rank = 0;                  // smallest j >= 1 with c_j above tolerance
  double second_moment = 0;      // sum_{j>=1} c_j^2 j!
  bool truncation_warning = false;
  double truncation_residual = 0;

  double coeff(int j) const { return j < static_cast<int>(coeffs.size()) ? coeffs[j] : 0.0; }
  int max_order() const { return static_cast<int>(coeffs.size()) - 1; }

  /// expansion of H - c_0 (centered subordinating function)
  HermiteExpansion centered() const;

  /// evaluate the (centered if c_0 = 0) expansion at x
  double operator()(double x) const;
};

/// Single-term expansion c_k = 1 for H_k itself.
HermiteExpansion pure(int k);

/// Coefficients c_j = E[H(xi) H_j(xi)]/j! by Gauss-Hermite quadrature,
/// orders 0..max_order. quad_points = 0 picks a size that integrates
/// degree-2*max_order polynomials exactly with margin.
HermiteExpansion expand_function(const std::function<double(double)>& f,
                                 int max_order = 20, int quad_points = 0);

/// E[H_j(X) H_l(Y)] = delta_{jl} j! r^j for jointly standard Gaussian
/// (X,Y) with correlation r.
double hermite_covariance(int j, int l, double r);

double factorial(int n);

}  // namespace hermite
}  // namespace chaoslab

#endif
