#ifndef CHAOSLAB_FBM_HPP
#define CHAOSLAB_FBM_HPP

#include <cstdint>
#include <vector>

#include "chaoslab/rng.hpp"

namespace chaoslab {
namespace fbm {

/// Fractional Brownian motion: EX(s)X(t) = scale/2 (s^2H + t^2H - |t-s|^2H).
struct FbmSpec {
  double hurst = 0.5;
  std::vector<double> grid;  // 0 <= t_1 < ... < t_n
  double scale = 1.0;        // EX(1)^2
};

double covariance(const FbmSpec& spec, double s, double t);

enum class FbmMethod { cholesky, circulant_fgn };

/// Exact Gaussian path on the spec grid. The circulant method requires a
/// uniform grid and samples the stationary increments.
std::vector<double> simulate(const FbmSpec& spec, const CounterRng& rng,
                             std::uint64_t replicate, FbmMethod method = FbmMethod::cholesky);

/// max over grid pairs of |R(as,at) - a^2H R(s,t)| / (1 + |R(s,t)|).
double check_self_similarity(const FbmSpec& spec, double a);

/// max over grid pairs and the given u of the stationary-increments defect
/// |E[X(s+u)-X(u)][X(t+u)-X(u)] - R(s,t)| / (1 + |R(s,t)|).
double check_stationary_increments(const FbmSpec& spec, double u);

/// Quadrature of the spectral-representation covariance (up to a constant):
/// int (e^{isu}-1)(e^{-itu}-1)/u^2 |u|^{1-2H} du. quad_points controls the
/// composite rule on the bounded part; the tail is handled analytically.
double spectral_covariance(double hurst, double s, double t, int quad_points = 1 << 19);

}  // namespace fbm
}  // namespace chaoslab

#endif
