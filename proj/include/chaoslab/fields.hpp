#ifndef CHAOSLAB_FIELDS_HPP
#define CHAOSLAB_FIELDS_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "chaoslab/hermite.hpp"
#include "chaoslab/rng.hpp"
#include "chaoslab/spectral.hpp"
#include "chaoslab/stats.hpp"

namespace chaoslab {
namespace fields {

using spectral::CorrelationModel;

/// One stationary Gaussian sample on a box of Z^nu, row-major values.
struct FieldSample {
  int nu = 1;
  std::vector<int> box;       // side lengths
  std::vector<double> values;
  std::uint64_t seed = 0, replicate = 0;

  std::size_t size() const { return values.size(); }
};

enum class FieldMethod { circulant, spectral_synthesis, cholesky };

/// Exact circulant sampler for nu = 1: embeds r(0..M/2) in a circulant of
/// power-of-two size M >= 2*box, so lags below the box length carry the
/// exact model covariance. Construction checks eigenvalue nonnegativity.
class CirculantSampler1D {
 public:
  CirculantSampler1D(const CorrelationModel& model, int box);
  std::vector<double> sample(const CounterRng& rng, std::uint64_t replicate) const;
  int box() const { return box_; }
  double min_eigenvalue() const { return min_eig_; }

 private:
  int box_, m_;
  double min_eig_;
  std::vector<double> lam_sqrt_;
};

FieldSample simulate_field(const CorrelationModel& model, const std::vector<int>& box,
                           const CounterRng& rng, std::uint64_t replicate,
                           FieldMethod method = FieldMethod::circulant);

/// xi_n = H(X_n) with the centered expansion (c_0 dropped).
FieldSample subordinate(const FieldSample& field, const hermite::HermiteExpansion& h);
/// direct function route; the Gaussian mean is subtracted
FieldSample subordinate(const FieldSample& field, const std::function<double(double)>& h);

enum class Regime { noncentral, central };

struct RenormalizedField {
  int nu = 1;
  int block = 1;       // N
  double norming = 1;  // A_N
  std::vector<int> box;
  std::vector<double> values;
};

/// A_N = N^{nu - k alpha/2} L(N)^{k/2} (noncentral; requires k alpha < nu)
/// or N^{nu/2} (central). Pass use_L = false to pin L = 1.
double norming_constant(const CorrelationModel& model, int N, Regime regime, int k,
                        bool use_L = true);

/// Block sums over side-N cubes divided by A_N; the box must be divisible
/// by N. A_N may be overridden (0 = use norming_constant with use_L=false
/// semantics chosen by the caller).
RenormalizedField renormalize(const FieldSample& xi, int N, Regime regime, int k,
                              const CorrelationModel& model, double a_n_override = 0);

/// E (Z_0^N)^2 = A_N^{-2} sum_j c_j^2 j! sum_{s,t in block} r(s-t)^j via the
/// displacement-count identity (pairs at displacement l: prod (N - |l_i|)).
double variance_exact(const CorrelationModel& model, const hermite::HermiteExpansion& h,
                      int N, double a_n);

struct SigmaLimit {
  double lattice_sum = 0;                  // sum_n r(n)^l
  std::vector<double> n_grid_estimates;    // N^-nu weighted double sums
  std::vector<int> n_grid;
  bool summable = false;
};

/// sigma_l^2 = sum_n r(n)^l by two routes: the N-sequence of normalized
/// block double sums and the direct lattice sum with geometric tail
/// extrapolation. Throws std::domain_error when the rank-l sum diverges.
SigmaLimit sigma_limit(const CorrelationModel& model, int l, const std::vector<int>& n_grid);

/// sigma^2 = sum_l c_l^2 l! sigma_l^2 for the expansion's orders.
double sigma_total(const hermite::HermiteExpansion& h, const CorrelationModel& model);

/// Cumulant diagnostics over replicate values; requires >= 1000 replicates.
MomentReport limit_diagnostics(std::span<const double> z);

struct PsiCheck {
  std::vector<int> n_grid;
  std::vector<double> psi_n;
  double psi_0 = 0;
  double psi_0_uncertainty = 0;
};

/// psi_N from the displacement sum against the exact r, psi_0 from the
/// singular limit integrand over [-1,1]^nu; k alpha < nu required.
PsiCheck psi_limit_check(const CorrelationModel& model, int k,
                         const std::vector<spectral::Vec>& t,
                         const std::vector<int>& n_grid);

}  // namespace fields
}  // namespace chaoslab

#endif
