#include "chaoslab/regular_system.hpp"

#include <stdexcept>

namespace chaoslab {
namespace chaos {

std::shared_ptr<const RegularSystem> build_regular_system(
    const spectral::SpectralDensity& g, int resolution) {
  if (resolution < 2 || resolution % 2 != 0)
    throw std::invalid_argument("build_regular_system: resolution must be even and >= 2");
  if (g.cells % resolution != 0)
    throw std::invalid_argument(
        "build_regular_system: resolution must divide the density grid");
  if (g.total_mass() <= 0)
    throw std::invalid_argument("build_regular_system: zero-mass support");

  auto sys = std::make_shared<RegularSystem>();
  sys->nu = g.nu;
  sys->half_width = g.half_width;
  sys->resolution = resolution;
  const int q = g.cells / resolution;  // fine cells per box per axis
  const double bw = 2.0 * g.half_width / resolution;

  const auto box_mass = [&](const std::vector<int>& idx) {
    if (g.nu == 1) {
      double m = 0;
      for (int a = 0; a < q; ++a) m += g.mass[static_cast<std::size_t>(idx[0]) * q + a];
      return m;
    }
    double m = 0;
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b)
        m += g.mass[(static_cast<std::size_t>(idx[0]) * q + a) * g.cells +
                    static_cast<std::size_t>(idx[1]) * q + b];
    return m;
  };

  const auto mirror_less = [&](const std::vector<int>& idx) {
    // true when idx is the canonical (positive) member of its mirror pair
    for (int a = 0; a < g.nu; ++a) {
      const int m = resolution - 1 - idx[a];
      if (idx[a] != m) return idx[a] > m;
    }
    return false;  // unreachable: no box is self-mirrored
  };

  std::vector<int> idx(g.nu, 0);
  const long total = g.nu == 1 ? resolution : static_cast<long>(resolution) * resolution;
  for (long flat = 0; flat < total; ++flat) {
    long f = flat;
    for (int a = g.nu - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(f % resolution);
      f /= resolution;
    }
    if (!mirror_less(idx)) continue;
    for (int a = 0; a < g.nu; ++a) {
      sys->lo.push_back(-g.half_width + idx[a] * bw);
      sys->hi.push_back(-g.half_width + (idx[a] + 1) * bw);
      sys->box_index.push_back(idx[a]);
    }
    sys->mass.push_back(box_mass(idx));
  }
  return sys;
}

}  // namespace chaos
}  // namespace chaoslab
