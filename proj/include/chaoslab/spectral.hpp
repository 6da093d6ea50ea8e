#ifndef CHAOSLAB_SPECTRAL_HPP
#define CHAOSLAB_SPECTRAL_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace chaoslab {
namespace spectral {

using Vec = std::vector<double>;       // point in R^nu
using Lattice = std::vector<long>;     // lattice point in Z^nu

enum class ModelKind { pure_power, farima, cauchy, white };

/// Stationary lattice correlation r(n) = |n|^-alpha a(n/|n|) L(|n|), r(0)=1,
/// together with the evaluation strategy that makes the table positive
/// definite. For nu=1 the fractional-difference (FARIMA) correlation with
/// d = (1-alpha)/2 provides an exact closed form; for nu=2 the generalized
/// Cauchy family (1+|n|^2/theta)^{-alpha/2} does.
struct CorrelationModel {
  int nu = 1;
  double alpha = 0.5;
  std::function<double(const Vec&)> angular;        // a(.), even on the sphere
  std::function<double(double)> extra_L;            // optional user L factor
  ModelKind kind = ModelKind::farima;
  double d = 0;       // FARIMA order (nu = 1)
  double theta = 1;   // Cauchy scale (nu = 2)

  double r(const Lattice& n) const;
  double r1(long n) const;              // nu = 1 shorthand
  /// L(t) with r(n) = |n|^-alpha a(n/|n|) L(|n|); closed form per kind.
  double effective_L(double t) const;
  bool is_white() const { return kind == ModelKind::white; }
};

/// Builds the lattice model for a decay exponent 0 < alpha < nu. The exact
/// pure power table is used only if its circulant embedding passes the
/// nonnegativity check at the probe size; otherwise the positive definite
/// fallback family is selected.
CorrelationModel power_law_model(int nu, double alpha,
                                 std::function<double(double)> extra_L = nullptr);
CorrelationModel white_noise_model(int nu);

/// Smallest circulant-embedding eigenvalue of the pure power table.
double pure_power_min_eigenvalue(int nu, double alpha, int probe);

/// Even measure on the frequency box [-half_width, half_width)^nu held as
/// per-cell integrals on a uniform cell-centered grid.
struct SpectralDensity {
  int nu = 1;
  double half_width = 0;
  int cells = 0;                 // per axis, even
  std::vector<double> mass;      // cells^nu entries, row-major

  double cell_width() const { return 2.0 * half_width / cells; }
  double center1(int i) const { return -half_width + (i + 0.5) * cell_width(); }
  Vec center(std::size_t flat) const;
  double total_mass() const;
  double max_even_asymmetry() const;   // 0 for an even measure
};

/// g(u) = |u|^{alpha-nu} b(u/|u|) h(|u|) integrated cell by cell; the default
/// radial cutoff h is the one consistent with the model's exact correlation
/// (nu=1) or a Gaussian taper (nu=2). Total mass normalized to r(0)=1.
SpectralDensity density_from_model(const CorrelationModel& model, int cells,
                                   std::function<double(double)> radial_cutoff = nullptr);

/// r(n) = integral of e^{i(n,x)} against the measure; real by evenness.
double correlation_from_density(const SpectralDensity& g, const Lattice& n);

/// G_N(A) = N^alpha / L(N) * G(A/N) on the dilated grid.
SpectralDensity rescale(const SpectralDensity& g, double N, const CorrelationModel& model);

/// Measure of [a,b] (nu=1) with fractional boundary cells.
double measure_interval(const SpectralDensity& g, double a, double b);

struct Identity84 {
  double lhs = 0, rhs = 0, abs_diff = 0;
  double richardson = 0;  // LHS change under grid coarsening, convergence gauge
};
/// Both sides of the limit-measure identity relating the rescaled spectrum
/// to the window-weighted power integral, at shift t. nu in {1,2}.
Identity84 check_identity_84(const CorrelationModel& model, const Vec& t,
                             int N, int cells);

enum class SlowlyVaryingKind { constant, log_kind, iterated_log, karamata };
std::function<double(double)> slowly_varying(SlowlyVaryingKind kind,
                                             std::function<double(double)> eps = nullptr);

struct KaramataTest {
  std::vector<double> t;
  std::vector<double> deviation;  // max_s |L(st)/L(t) - 1| per t
  double max_deviation = 0;
};
KaramataTest karamata_ratio_test(const std::function<double(double)>& L,
                                 const std::vector<double>& s_values,
                                 const std::vector<double>& t_grid);

struct SelfSimilarParams {
  double kappa = 0;
  int k = 1;
  int nu = 1;
};

struct RadialConstant {
  bool finite = false;
  double value = 0;        // C(kappa,k) with J_{kappa,k}(x) = C |x|^{2 kappa k - nu}
  double last_growth = 0;  // relative growth at the final cutoff doubling
};
/// Radial constant of the k-fold convolution power, with divergence detected
/// by cutoff doubling (increments of the positive integrand must die out).
RadialConstant radial_constant(const SelfSimilarParams& p);

/// J_{kappa,k}(x); throws std::domain_error in the divergent regime.
double j_kappa_k(const SelfSimilarParams& p, const Vec& x);

struct Prop55 {
  bool finite = false;
  double value = 0;  // D(n) when finite
};
/// Finiteness and value of D(n) = int |chi_n|^2 dG^k for the homogeneous
/// measure with exponent 2*kappa.
Prop55 check_prop_55(const SelfSimilarParams& p, const Lattice& n);

}  // namespace spectral
}  // namespace chaoslab

#endif
