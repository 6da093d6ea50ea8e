#ifndef CHAOSLAB_GAUSS_HERMITE_HPP
#define CHAOSLAB_GAUSS_HERMITE_HPP

#include <vector>

namespace chaoslab {

/// Gauss-Hermite rule for the probabilists' weight e^{-x^2/2}/sqrt(2 pi).
/// Weights sum to 1; exact for polynomials up to degree 2n-1.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussHermiteRule gauss_hermite(int n);

}  // namespace chaoslab

#endif
