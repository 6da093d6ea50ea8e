#ifndef CHAOSLAB_REGULAR_SYSTEM_HPP
#define CHAOSLAB_REGULAR_SYSTEM_HPP

#include <cstdlib>
#include <memory>
#include <vector>

#include "chaoslab/spectral.hpp"

namespace chaoslab {
namespace chaos {

/// Mirror-paired partition of the frequency box minus the coordinate
/// hyperplanes. Cells are indexed j = +-1..+-M with cell(-j) = -cell(j)
/// exactly; only the positive half is stored.
struct RegularSystem {
  int nu = 1;
  double half_width = 0;
  int resolution = 0;             // boxes per axis, even
  std::vector<double> lo, hi;     // nu * M, box bounds of cell j = i+1
  std::vector<double> mass;       // M
  std::vector<int> box_index;     // nu * M multi-index of the positive boxes

  int pairs() const { return static_cast<int>(mass.size()); }

  double mass_of(int signed_j) const { return mass[static_cast<std::size_t>(std::abs(signed_j)) - 1]; }

  /// center of cell signed_j (mirrored for negative indices)
  void center(int signed_j, double* out) const {
    const std::size_t i = static_cast<std::size_t>(std::abs(signed_j)) - 1;
    const double s = signed_j > 0 ? 1.0 : -1.0;
    for (int a = 0; a < nu; ++a)
      out[a] = s * 0.5 * (lo[i * nu + a] + hi[i * nu + a]);
  }

  double total_mass() const {
    double s = 0;
    for (double m : mass) s += m;
    return 2.0 * s;
  }
};

/// Groups the density's cells into resolution^nu mirror-paired boxes.
/// The density's cell count per axis must be a multiple of the resolution.
std::shared_ptr<const RegularSystem> build_regular_system(
    const spectral::SpectralDensity& g, int resolution);

}  // namespace chaos
}  // namespace chaoslab

#endif
