#include "chaoslab/fbm.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "chaoslab/fft.hpp"

namespace chaoslab {
namespace fbm {

namespace {

void validate(const FbmSpec& spec) {
  if (!(spec.hurst > 0.0 && spec.hurst < 1.0))
    throw std::invalid_argument("fbm: hurst must lie in (0,1)");
  if (spec.grid.empty()) throw std::invalid_argument("fbm: empty grid");
  double prev = -1.0;
  for (double t : spec.grid) {
    if (t < 0.0 || t <= prev)
      throw std::invalid_argument("fbm: grid must be increasing and nonnegative");
    prev = t;
  }
}

int next_pow2(int n) {
  int m = 1;
  while (m < n) m *= 2;
  return m;
}

// fGn autocovariance at unit spacing, gamma(k) for unit-variance increments
double fgn_gamma(double hurst, long k) {
  const double h2 = 2.0 * hurst;
  const double a = static_cast<double>(std::labs(k));
  return 0.5 * (std::pow(a + 1.0, h2) - 2.0 * std::pow(a, h2) +
                std::pow(std::abs(a - 1.0), h2));
}

}  // namespace

double covariance(const FbmSpec& spec, double s, double t) {
  if (s < 0 || t < 0) throw std::invalid_argument("fbm::covariance: times must be >= 0");
  const double h2 = 2.0 * spec.hurst;
  return 0.5 * spec.scale *
         (std::pow(s, h2) + std::pow(t, h2) - std::pow(std::abs(t - s), h2));
}

std::vector<double> simulate(const FbmSpec& spec, const CounterRng& rng,
                             std::uint64_t replicate, FbmMethod method) {
  validate(spec);
  const int n = static_cast<int>(spec.grid.size());

  if (method == FbmMethod::cholesky) {
    if (n > 4096) throw std::invalid_argument("fbm: grid size > 4096 for cholesky");
    // X(0) = 0 exactly; factor the covariance of the positive times
    std::vector<int> pos;
    for (int i = 0; i < n; ++i)
      if (spec.grid[i] > 0) pos.push_back(i);
    const int m = static_cast<int>(pos.size());
    std::vector<double> a(static_cast<std::size_t>(m) * m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        a[static_cast<std::size_t>(i) * m + j] =
            covariance(spec, spec.grid[pos[i]], spec.grid[pos[j]]);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j <= i; ++j) {
        double s = a[static_cast<std::size_t>(i) * m + j];
        for (int k = 0; k < j; ++k)
          s -= a[static_cast<std::size_t>(i) * m + k] * a[static_cast<std::size_t>(j) * m + k];
        if (i == j) {
          if (s <= 0)
            throw std::runtime_error("fbm: covariance factorization failed (bug trap)");
          a[static_cast<std::size_t>(i) * m + j] = std::sqrt(s);
        } else {
          a[static_cast<std::size_t>(i) * m + j] = s / a[static_cast<std::size_t>(j) * m + j];
        }
      }
    }
    std::vector<double> z(m), path(n, 0.0);
    for (int i = 0; i < m; ++i) z[i] = rng.normal(replicate, static_cast<std::uint64_t>(i), 0);
    for (int i = 0; i < m; ++i) {
      double s = 0;
      for (int j = 0; j <= i; ++j) s += a[static_cast<std::size_t>(i) * m + j] * z[j];
      path[pos[i]] = s;
    }
    return path;
  }

  // circulant-fgn: uniform grid required, increments embedded exactly
  const double dt = spec.grid[0] > 0 ? spec.grid[0]
                                     : (n > 1 ? spec.grid[1] - spec.grid[0] : 1.0);
  for (int i = 0; i + 1 < n; ++i)
    if (std::abs((spec.grid[i + 1] - spec.grid[i]) - dt) > 1e-12 * std::max(1.0, dt))
      throw std::invalid_argument("fbm: circulant-fgn needs a uniform grid");
  if (std::abs(spec.grid[0] - dt) > 1e-12 && spec.grid[0] != 0.0)
    throw std::invalid_argument("fbm: circulant-fgn grid must start at 0 or dt");

  const int nincr = spec.grid[0] == 0.0 ? n - 1 : n;
  if (nincr < 1) return std::vector<double>(n, 0.0);
  const int m = next_pow2(2 * nincr);
  std::vector<std::complex<double>> c(m);
  for (int j = 0; j < m; ++j) {
    const long lag = j <= m / 2 ? j : m - j;
    c[j] = fgn_gamma(spec.hurst, lag);
  }
  fft_forward(c);
  double mx = 0;
  for (const auto& z : c) mx = std::max(mx, z.real());
  for (auto& z : c) {
    if (z.real() < -1e-8 * mx)
      throw std::runtime_error("fbm: fgn circulant embedding indefinite (bug trap)");
    z = std::sqrt(std::max(0.0, z.real()));
  }
  std::vector<std::complex<double>> e(m);
  for (int k = 0; k < m; ++k)
    e[k] = c[k].real() * std::complex<double>(
                             rng.normal(replicate, static_cast<std::uint64_t>(k), 0),
                             rng.normal(replicate, static_cast<std::uint64_t>(k), 1));
  fft_inverse(e);
  const double scale_fgn =
      std::sqrt(spec.scale) * std::pow(dt, spec.hurst) / std::sqrt(static_cast<double>(m));
  std::vector<double> path(n, 0.0);
  double acc = 0;
  int out = 0;
  if (spec.grid[0] == 0.0) path[out++] = 0.0;
  for (int i = 0; i < nincr; ++i) {
    acc += e[i].real() * scale_fgn;
    path[out++] = acc;
  }
  return path;
}

double check_self_similarity(const FbmSpec& spec, double a) {
  validate(spec);
  if (a <= 0) throw std::invalid_argument("check_self_similarity: a > 0 required");
  double worst = 0;
  const double f = std::pow(a, 2.0 * spec.hurst);
  for (double s : spec.grid)
    for (double t : spec.grid) {
      const double base = covariance(spec, s, t);
      const double dev = std::abs(covariance(spec, a * s, a * t) - f * base) /
                         (1.0 + std::abs(base));
      worst = std::max(worst, dev);
    }
  return worst;
}

double check_stationary_increments(const FbmSpec& spec, double u) {
  validate(spec);
  if (u < 0) throw std::invalid_argument("check_stationary_increments: u >= 0");
  double worst = 0;
  for (double s : spec.grid)
    for (double t : spec.grid) {
      const double lhs = covariance(spec, s + u, t + u) - covariance(spec, s + u, u) -
                         covariance(spec, u, t + u) + covariance(spec, u, u);
      const double base = covariance(spec, s, t);
      worst = std::max(worst, std::abs(lhs - base) / (1.0 + std::abs(base)));
    }
  return worst;
}

double spectral_covariance(double hurst, double s, double t, int quad_points) {
  if (!(hurst > 0.0 && hurst < 1.0))
    throw std::invalid_argument("spectral_covariance: hurst in (0,1)");
  // real part folded over +-u:
  //   2 int_0^inf [1 + cos((s-t)u) - cos(su) - cos(tu)] u^{-1-2H} du
  const double p = 1.0 + 2.0 * hurst;
  const auto bracket = [&](double u) {
    return 1.0 + std::cos((s - t) * u) - std::cos(s * u) - std::cos(t * u);
  };
  // [0, 1]: bracket(u)/u^2 is smooth, the rest is u^{1-2H}; the substitution
  // v = u^{2-2H} makes the integrand smooth in v
  double acc = 0;
  {
    const double q = 2.0 - 2.0 * hurst;
    const int pts = 8192;
    const double h = 1.0 / pts;
    for (int i = 0; i < pts; ++i) {
      const double v = (i + 0.5) * h;
      const double u = std::pow(v, 1.0 / q);
      acc += bracket(u) / (u * u) * h / q;
    }
  }
  // [1, U] composite midpoint, then the analytic monotone tail plus two
  // integration-by-parts terms for each oscillatory piece
  const double U = 2000.0;
  {
    const int pts = quad_points;
    const double h = (U - 1.0) / pts;
    for (int i = 0; i < pts; ++i) {
      const double u = 1.0 + (i + 0.5) * h;
      acc += bracket(u) * std::pow(u, -p) * h;
    }
  }
  acc += std::pow(U, -p + 1.0) / (p - 1.0);  // the "1 +" part of the bracket
  const auto osc_tail = [&](double a, double sign) {
    if (a == 0.0) {
      acc += sign * std::pow(U, -p + 1.0) / (p - 1.0);
      return;
    }
    const double aa = std::abs(a);
    acc += sign * (-std::sin(aa * U) / aa * std::pow(U, -p) +
                   p / aa * (std::cos(aa * U) / aa * std::pow(U, -p - 1.0)));
  };
  osc_tail(s - t, 1.0);
  osc_tail(s, -1.0);
  osc_tail(t, -1.0);
  return 2.0 * acc;
}

}  // namespace fbm
}  // namespace chaoslab
