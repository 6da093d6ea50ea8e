#ifndef CHAOSLAB_CHAOS_HPP
#define CHAOSLAB_CHAOS_HPP

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include "chaoslab/diagrams.hpp"
#include "chaoslab/regular_system.hpp"
#include "chaoslab/rng.hpp"

namespace chaoslab {
namespace chaos {

/// One draw of the complex Gaussian spectral measure over a regular system:
/// Z(-j) = conj(Z(j)); Re/Im of Z(j) independent N(0, mass_j / 2).
struct SpectralRealization {
  std::shared_ptr<const RegularSystem> system;
  std::vector<std::complex<double>> z;  // j = 1..M

  std::complex<double> value(int signed_j) const {
    const auto& v = z[static_cast<std::size_t>(std::abs(signed_j)) - 1];
    return signed_j > 0 ? v : std::conj(v);
  }
};

/// Deterministic draw keyed by (seed, replicate, cell index).
SpectralRealization sample_realization(std::shared_ptr<const RegularSystem> sys,
                                       const CounterRng& rng, std::uint64_t replicate);

/// Additivity-based coupling: sums the fine draw's values over each coarse
/// cell, producing the draw the coarse system would see for the same omega.
/// The coarse resolution must divide the fine one.
SpectralRealization aggregate_to(const SpectralRealization& fine,
                                 std::shared_ptr<const RegularSystem> coarse);

/// n-fold integral of a simple kernel: sum over index tuples with all
/// |j_l| distinct of f(j_1..j_n) Z_{j_1}...Z_{j_n}. Real up to roundoff for
/// Hermitian kernels; the imaginary residue is checked against
/// 1e-9 * (1 + |value|).
double integrate(const diagrams::GridKernel& kernel, const SpectralRealization& omega);

struct ItoComparison {
  double lhs = 0;  // prod_s H_{p_s}( integral of phi_s )
  double rhs = 0;  // integral of the tensor-product kernel on the same draw
  double diff = 0;
};

/// Both sides of the Hermite product identity on one realization. The phis
/// must be orthonormal on the discrete system within 1e-6.
ItoComparison ito_compare(const std::vector<diagrams::GridKernel>& phis,
                          const std::vector<int>& powers,
                          const SpectralRealization& omega);

/// kernel multiplied by e^{i (t, x_1 + ... + x_n)} at cell centers.
diagrams::GridKernel shift_kernel(const diagrams::GridKernel& kernel,
                                  const std::vector<double>& t);

/// Kernel for the target system with values f(x) prod g(x_i); validates
/// |g|^2 = dG/dG' cellwise to 1e-9 relative.
diagrams::GridKernel change_of_variables(
    const diagrams::GridKernel& kernel,
    const std::function<std::complex<double>(std::span<const double>)>& g,
    std::shared_ptr<const RegularSystem> target);

}  // namespace chaos
}  // namespace chaoslab

#endif
