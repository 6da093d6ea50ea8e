#ifndef CHAOSLAB_STATS_HPP
#define CHAOSLAB_STATS_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace chaoslab {

/// Standardized moment estimates with jackknife standard errors.
struct MomentReport {
  std::size_t n = 0;
  double mean = 0, variance = 0, skewness = 0, excess_kurtosis = 0;
  double se_mean = 0, se_variance = 0, se_skewness = 0, se_kurtosis = 0;
  bool gaussian_verdict = false;  // |skew| and |ex.kurt| within 4 SE of 0
};

MomentReport moment_report(std::span<const double> x);

double sample_mean(std::span<const double> x);
double sample_variance(std::span<const double> x);

// standard error of the sample variance, (m4 - m2^2)/n based
double se_of_variance(std::span<const double> x);

// standard error of the sample mean of x
double se_of_mean(std::span<const double> x);

// slope of the least-squares line y = a + b x
double ls_slope(std::span<const double> x, std::span<const double> y);

struct SlopeFit {
  double slope = 0;
  double se = 0;
};
// weighted least squares with known per-point standard deviations
SlopeFit wls_slope(std::span<const double> x, std::span<const double> y,
                   std::span<const double> sigma);

}  // namespace chaoslab

#endif
