#include "chaoslab/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace chaoslab {

double sample_mean(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
  const double m = sample_mean(x);
  double s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double se_of_mean(std::span<const double> x) {
  return std::sqrt(sample_variance(x) / static_cast<double>(x.size()));
}

double se_of_variance(std::span<const double> x) {
  const double m = sample_mean(x);
  const double n = static_cast<double>(x.size());
  double m2 = 0, m4 = 0;
  for (double v : x) {
    const double d2 = (v - m) * (v - m);
    m2 += d2;
    m4 += d2 * d2;
  }
  m2 /= n;
  m4 /= n;
  return std::sqrt((m4 - m2 * m2) / n);
}

namespace {

struct Central {
  double mean, m2, m3, m4;  // central moments (biased, 1/n)
};

Central central_moments(double s1, double s2, double s3, double s4, double n) {
  const double m = s1 / n;
  const double m2 = s2 / n - m * m;
  const double m3 = s3 / n - 3 * m * (s2 / n) + 2 * m * m * m;
  const double m4 =
      s4 / n - 4 * m * (s3 / n) + 6 * m * m * (s2 / n) - 3 * m * m * m * m;
  return {m, m2, m3, m4};
}

double skew_of(const Central& c) { return c.m3 / std::pow(c.m2, 1.5); }
double kurt_of(const Central& c) { return c.m4 / (c.m2 * c.m2) - 3.0; }

}  // namespace

MomentReport moment_report(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 8) throw std::invalid_argument("moment_report: need at least 8 samples");
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  for (double v : x) {
    s1 += v;
    s2 += v * v;
    s3 += v * v * v;
    s4 += v * v * v * v;
  }
  const double nd = static_cast<double>(n);
  const Central full = central_moments(s1, s2, s3, s4, nd);

  MomentReport r;
  r.n = n;
  r.mean = full.mean;
  r.variance = full.m2 * nd / (nd - 1);
  r.skewness = skew_of(full);
  r.excess_kurtosis = kurt_of(full);

  // delete-1 jackknife over each statistic
  double jm = 0, jv = 0, js = 0, jk = 0;
  std::vector<double> pm(n), pv(n), ps(n), pk(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = x[i];
    const Central c = central_moments(s1 - v, s2 - v * v, s3 - v * v * v,
                                      s4 - v * v * v * v, nd - 1);
    pm[i] = c.mean;
    pv[i] = c.m2 * (nd - 1) / (nd - 2);
    ps[i] = skew_of(c);
    pk[i] = kurt_of(c);
    jm += pm[i];
    jv += pv[i];
    js += ps[i];
    jk += pk[i];
  }
  jm /= nd; jv /= nd; js /= nd; jk /= nd;
  double vm = 0, vv = 0, vs = 0, vk = 0;
  for (std::size_t i = 0; i < n; ++i) {
    vm += (pm[i] - jm) * (pm[i] - jm);
    vv += (pv[i] - jv) * (pv[i] - jv);
    vs += (ps[i] - js) * (ps[i] - js);
    vk += (pk[i] - jk) * (pk[i] - jk);
  }
  const double f = (nd - 1) / nd;
  r.se_mean = std::sqrt(f * vm);
  r.se_variance = std::sqrt(f * vv);
  r.se_skewness = std::sqrt(f * vs);
  r.se_kurtosis = std::sqrt(f * vk);
  r.gaussian_verdict = std::abs(r.skewness) <= 4 * r.se_skewness &&
                       std::abs(r.excess_kurtosis) <= 4 * r.se_kurtosis;
  return r;
}

double ls_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("ls_slope: size mismatch");
  const double mx = sample_mean(x), my = sample_mean(y);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

SlopeFit wls_slope(std::span<const double> x, std::span<const double> y,
                   std::span<const double> sigma) {
  if (x.size() != y.size() || x.size() != sigma.size() || x.size() < 2)
    throw std::invalid_argument("wls_slope: size mismatch");
  double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = 1.0 / (sigma[i] * sigma[i]);
    sw += w;
    swx += w * x[i];
    swy += w * y[i];
    swxx += w * x[i] * x[i];
    swxy += w * x[i] * y[i];
  }
  const double denom = sw * swxx - swx * swx;
  SlopeFit out;
  out.slope = (sw * swxy - swx * swy) / denom;
  out.se = std::sqrt(sw / denom);
  return out;
}

}  // namespace chaoslab
