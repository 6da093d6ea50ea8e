#include "chaoslab/gauss_hermite.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chaoslab {

namespace {

// Symmetric tridiagonal eigensolver (implicit QL with Wilkinson shift),
// tracking only the first row of the eigenvector matrix. d = diagonal,
// e = subdiagonal (e[0] unused), z starts as (1,0,...,0).
void tql_first_row(std::vector<double>& d, std::vector<double>& e,
                   std::vector<double>& z) {
  const int n = static_cast<int>(d.size());
  for (int i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= 1e-16 * dd) break;
      }
      if (m != l) {
        if (++iter == 50) throw std::runtime_error("gauss_hermite: QL failed");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        for (int i = m - 1; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          f = z[i + 1];
          z[i + 1] = s * z[i] + c * f;
          z[i] = c * z[i] - s * f;
        }
        if (r == 0.0 && m - 1 >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace

GaussHermiteRule gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n must be positive");
  // Jacobi matrix of the monic Hermite recursion H_{k+1} = x H_k - k H_{k-1}:
  // zero diagonal, subdiagonal sqrt(k).
  std::vector<double> d(n, 0.0), e(n, 0.0), z(n, 0.0);
  for (int k = 1; k < n; ++k) e[k] = std::sqrt(static_cast<double>(k));
  z[0] = 1.0;
  tql_first_row(d, e, z);

  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return d[a] < d[b]; });

  GaussHermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = d[idx[i]];
    rule.weights[i] = z[idx[i]] * z[idx[i]];  // total mass 1
  }
  // symmetrize: nodes come in +- pairs for the even weight
  for (int i = 0, j = n - 1; i < j; ++i, --j) {
    const double a = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    rule.nodes[i] = -a;
    rule.nodes[j] = a;
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.weights[i] = rule.weights[j] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace chaoslab
