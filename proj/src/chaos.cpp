#include "chaoslab/chaos.hpp"

#include <cmath>
#include <stdexcept>

#include "chaoslab/hermite.hpp"

namespace chaoslab {
namespace chaos {

SpectralRealization sample_realization(std::shared_ptr<const RegularSystem> sys,
                                       const CounterRng& rng, std::uint64_t replicate) {
  SpectralRealization w;
  w.z.resize(sys->pairs());
  for (int j = 1; j <= sys->pairs(); ++j) {
    const double s = std::sqrt(sys->mass[j - 1] / 2.0);
    w.z[j - 1] = {s * rng.normal(replicate, static_cast<std::uint64_t>(j), 0),
                  s * rng.normal(replicate, static_cast<std::uint64_t>(j), 1)};
  }
  w.system = std::move(sys);
  return w;
}

SpectralRealization aggregate_to(const SpectralRealization& fine,
                                 std::shared_ptr<const RegularSystem> coarse) {
  const RegularSystem& f = *fine.system;
  const RegularSystem& c = *coarse;
  if (f.nu != c.nu || f.half_width != c.half_width || f.resolution % c.resolution != 0)
    throw std::invalid_argument("aggregate_to: coarse system does not refine-match");
  const int q = f.resolution / c.resolution;

  SpectralRealization out;
  out.system = coarse;
  out.z.assign(c.pairs(), 0.0);
  // locate each fine positive box inside a coarse box; signs follow from
  // whether that coarse box is stored positive or as a mirror image
  for (int jf = 1; jf <= f.pairs(); ++jf) {
    std::vector<int> cidx(f.nu);
    for (int a = 0; a < f.nu; ++a)
      cidx[a] = f.box_index[static_cast<std::size_t>(jf - 1) * f.nu + a] / q;
    // find the coarse cell with this index or its mirror
    int found = 0;
    for (int jc = 1; jc <= c.pairs() && !found; ++jc) {
      bool direct = true, mirrored = true;
      for (int a = 0; a < c.nu; ++a) {
        const int ci = c.box_index[static_cast<std::size_t>(jc - 1) * c.nu + a];
        if (ci != cidx[a]) direct = false;
        if (c.resolution - 1 - ci != cidx[a]) mirrored = false;
      }
      if (direct) found = jc;
      else if (mirrored) found = -jc;
    }
    if (found == 0) throw std::logic_error("aggregate_to: unmatched fine cell");
    if (found > 0)
      out.z[found - 1] += fine.value(jf);
    else
      out.z[-found - 1] += std::conj(fine.value(jf));
  }
  return out;
}

double integrate(const diagrams::GridKernel& kernel, const SpectralRealization& omega) {
  if (kernel.system().get() != omega.system.get())
    throw std::invalid_argument("integrate: kernel and realization use different systems");
  const double defect = kernel.hermitian_defect();
  if (defect > 1e-9)
    throw std::invalid_argument("integrate: kernel violates Hermitian symmetry");

  const int n = kernel.arity();
  const int M = kernel.pairs();
  if (n == 0) return kernel.raw(0).real();

  std::vector<int> idx(n);
  std::vector<std::complex<double>> zprod(n + 1);
  zprod[0] = 1.0;
  std::complex<double> acc = 0;
  std::uint64_t used = 0;  // bitmask over |j|

  const std::function<void(int)> rec = [&](int depth) {
    if (depth == n) {
      acc += kernel.value(idx) * zprod[n];
      return;
    }
    for (int j = -M; j <= M; ++j) {
      if (j == 0) continue;
      const std::uint64_t bit = 1ull << (std::abs(j) - 1);
      if (used & bit) continue;
      used |= bit;
      idx[depth] = j;
      zprod[depth + 1] = zprod[depth] * omega.value(j);
      rec(depth + 1);
      used &= ~bit;
    }
  };
  if (M > 64) throw std::invalid_argument("integrate: more than 64 cell pairs unsupported");
  rec(0);

  if (std::abs(acc.imag()) > 1e-9 * (1.0 + std::abs(acc.real())))
    throw std::runtime_error("integrate: imaginary residue above tolerance");
  return acc.real();
}

ItoComparison ito_compare(const std::vector<diagrams::GridKernel>& phis,
                          const std::vector<int>& powers,
                          const SpectralRealization& omega) {
  if (phis.empty() || phis.size() != powers.size())
    throw std::invalid_argument("ito_compare: need one power per kernel");
  for (const auto& p : phis) {
    if (p.arity() != 1) throw std::invalid_argument("ito_compare: phis must have arity 1");
    if (p.system().get() != omega.system.get())
      throw std::invalid_argument("ito_compare: system mismatch");
  }
  for (std::size_t s = 0; s < phis.size(); ++s)
    for (std::size_t t = 0; t < phis.size(); ++t) {
      const double target = s == t ? 1.0 : 0.0;
      if (std::abs(phis[s].inner(phis[t]) - target) > 1e-6)
        throw std::invalid_argument("ito_compare: kernels are not orthonormal on the system");
    }

  ItoComparison out;
  out.lhs = 1.0;
  int total = 0;
  for (std::size_t s = 0; s < phis.size(); ++s) {
    out.lhs *= hermite::eval_hermite(powers[s], integrate(phis[s], omega));
    total += powers[s];
  }

  // tensor-product kernel g_1 (x) ... (x) g_N with g blocks repeating phi_s
  diagrams::GridKernel tensor(omega.system, total);
  const int M = phis[0].pairs();
  std::vector<int> idx(total);
  std::vector<int> which(total);
  {
    int i = 0;
    for (std::size_t s = 0; s < phis.size(); ++s)
      for (int rep = 0; rep < powers[s]; ++rep) which[i++] = static_cast<int>(s);
  }
  const std::size_t nvals = tensor.flat_size();
  for (std::size_t flat = 0; flat < nvals; ++flat) {
    std::size_t fl = flat;
    for (int a = total - 1; a >= 0; --a) {
      const int slot = static_cast<int>(fl % (2 * M));
      idx[a] = slot < M ? slot - M : slot - M + 1;
      fl /= 2 * M;
    }
    std::complex<double> v = 1.0;
    for (int a = 0; a < total; ++a) v *= phis[which[a]].value(std::span<const int>(&idx[a], 1));
    tensor.raw(flat) = v;
  }
  out.rhs = integrate(tensor, omega);
  out.diff = std::abs(out.lhs - out.rhs);
  return out;
}

diagrams::GridKernel shift_kernel(const diagrams::GridKernel& kernel,
                                  const std::vector<double>& t) {
  const auto sys = kernel.system();
  if (static_cast<int>(t.size()) != sys->nu)
    throw std::invalid_argument("shift_kernel: dimension mismatch");
  diagrams::GridKernel out = kernel;
  const int n = kernel.arity();
  std::vector<double> c(sys->nu);
  std::size_t flat = 0;
  kernel.for_each_tuple([&](std::span<const int> idx, std::complex<double> v) {
    double phase = 0;
    for (int a = 0; a < n; ++a) {
      sys->center(idx[a], c.data());
      for (int b = 0; b < sys->nu; ++b) phase += t[b] * c[b];
    }
    out.raw(flat++) = v * std::polar(1.0, phase);
  });
  return out;
}

diagrams::GridKernel change_of_variables(
    const diagrams::GridKernel& kernel,
    const std::function<std::complex<double>(std::span<const double>)>& g,
    std::shared_ptr<const RegularSystem> target) {
  const auto src = kernel.system();
  if (src->nu != target->nu || src->pairs() != target->pairs())
    throw std::invalid_argument("change_of_variables: incompatible systems");
  std::vector<double> c(src->nu);
  for (int j = 1; j <= src->pairs(); ++j) {
    src->center(j, c.data());
    const double ratio = src->mass_of(j) / target->mass_of(j);
    const double g2 = std::norm(g(c));
    if (std::abs(g2 - ratio) > 1e-9 * (1.0 + std::abs(ratio)))
      throw std::invalid_argument(
          "change_of_variables: |g|^2 does not match the density ratio");
  }
  diagrams::GridKernel out(target, kernel.arity());
  std::size_t flat = 0;
  kernel.for_each_tuple([&](std::span<const int> idx, std::complex<double> v) {
    std::complex<double> w = v;
    for (int a = 0; a < kernel.arity(); ++a) {
      src->center(idx[a], c.data());
      w *= g(c);
    }
    out.raw(flat++) = w;
  });
  return out;
}

}  // namespace chaos
}  // namespace chaoslab
