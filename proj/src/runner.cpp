#include "chaoslab/runner.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "chaoslab/chaos.hpp"
#include "chaoslab/csv.hpp"
#include "chaoslab/diagrams.hpp"
#include "chaoslab/fbm.hpp"
#include "chaoslab/fields.hpp"
#include "chaoslab/gauss_hermite.hpp"
#include "chaoslab/hermite.hpp"
#include "chaoslab/parallel.hpp"
#include "chaoslab/rng.hpp"
#include "chaoslab/spectral.hpp"
#include "chaoslab/stats.hpp"
#include "chaoslab/tails.hpp"

namespace chaoslab {
namespace cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kVersion = "chaoslab 0.1.0";

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

struct Suite {
  std::vector<Check> checks;
  json extra;                          // suite-specific manifest entries
  std::vector<std::string> artifacts;  // extra csv files written
  fs::path out;
  void add(const std::string& name, bool pass, const std::string& detail = "") {
    checks.push_back({name, pass, detail});
  }
  void write_artifact(const std::string& file, const CsvTable& table) {
    const std::string path = (out / file).string();
    table.write(path);
    artifacts.push_back(path);
  }
};

std::function<double(double)> make_L(const std::string& spec) {
  using spectral::SlowlyVaryingKind;
  if (spec == "const") return nullptr;
  if (spec == "log") return spectral::slowly_varying(SlowlyVaryingKind::log_kind);
  if (spec == "iterated-log")
    return spectral::slowly_varying(SlowlyVaryingKind::iterated_log);
  throw ConfigError("L-spec", "unknown slowly varying spec: " + spec);
}

spectral::CorrelationModel model_from(const RunConfig& cfg) {
  if (cfg.a_spec != "const")
    throw ConfigError("a-spec", "only the constant angular factor is built in");
  return spectral::power_law_model(cfg.nu, cfg.alpha, make_L(cfg.L_spec));
}

// ---------------------------------------------------------------------------

void suite_hermite(const RunConfig&, Suite& s, CsvTable& csv) {
  const auto rule = gauss_hermite(64);
  double worst_orth = 0;
  for (int j = 0; j <= 6; ++j)
    for (int l = 0; l <= 6; ++l) {
      double q = 0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        q += rule.weights[i] * hermite::eval_hermite(j, rule.nodes[i]) *
             hermite::eval_hermite(l, rule.nodes[i]);
      const double target = j == l ? hermite::factorial(j) : 0.0;
      worst_orth = std::max(worst_orth,
                            std::abs(q - target) / std::max(1.0, std::abs(target)));
    }
  s.add("orthogonality", worst_orth <= 1e-10);
  csv.new_row().cell("orthogonality").cell(worst_orth).cell(1e-10).cell(worst_orth <= 1e-10);

  // closed form H_n(x) = sum_k (-1)^k n!/(k! (n-2k)! 2^k) x^{n-2k}
  double worst_rec = 0;
  for (int n = 0; n <= 8; ++n) {
    for (int t = 0; t < 100; ++t) {
      const double x = -4.0 + 8.0 * t / 99.0;
      double closed = 0;
      for (int k = 0; 2 * k <= n; ++k) {
        const double c = ((k % 2) ? -1.0 : 1.0) * hermite::factorial(n) /
                         (hermite::factorial(k) * hermite::factorial(n - 2 * k) *
                          std::pow(2.0, k));
        closed += c * std::pow(x, n - 2 * k);
      }
      const double rec = hermite::eval_hermite(n, x);
      worst_rec = std::max(worst_rec, std::abs(rec - closed) / std::max(1.0, std::abs(closed)));
    }
  }
  s.add("recursion_vs_closed_form", worst_rec <= 1e-9);
  csv.new_row().cell("recursion_vs_closed_form").cell(worst_rec).cell(1e-9).cell(worst_rec <= 1e-9);

  // bivariate quadrature oracle for the covariance identity
  double worst_cov = 0;
  for (int j = 0; j <= 4; ++j)
    for (int l = 0; l <= 4; ++l)
      for (double r : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
        double q = 0;
        for (std::size_t a = 0; a < rule.nodes.size(); ++a)
          for (std::size_t b = 0; b < rule.nodes.size(); ++b) {
            const double x = rule.nodes[a];
            const double y = r * x + std::sqrt(1.0 - r * r) * rule.nodes[b];
            q += rule.weights[a] * rule.weights[b] * hermite::eval_hermite(j, x) *
                 hermite::eval_hermite(l, y);
          }
        worst_cov = std::max(worst_cov, std::abs(q - hermite::hermite_covariance(j, l, r)));
      }
  s.add("covariance_vs_quadrature", worst_cov <= 1e-8);
  csv.new_row().cell("covariance_vs_quadrature").cell(worst_cov).cell(1e-8).cell(worst_cov <= 1e-8);

  const auto e1 = hermite::expand_function([](double x) { return x * x - 1.0; }, 12);
  const auto e2 = hermite::expand_function([](double x) { return x * x * x; }, 12);
  const bool ex1 = e1.rank == 2 && std::abs(e1.coeff(2) - 1.0) < 1e-10;
  const bool ex2 = e2.rank == 1 && std::abs(e2.coeff(1) - 3.0) < 1e-10 &&
                   std::abs(e2.coeff(3) - 1.0) < 1e-10;
  s.add("expansion_examples", ex1 && ex2);
  csv.new_row().cell("expansion_examples").cell(ex1 && ex2 ? 0.0 : 1.0).cell(0.0).cell(ex1 && ex2);
}

// ---------------------------------------------------------------------------

void suite_diagram_moments(const RunConfig& cfg, Suite& s, CsvTable& csv) {
  const auto rule = gauss_hermite(96);
  for (int p = 2; p <= cfg.max_rows; p += 2) {
    if (cfg.m * p / 2 > 8) break;
    const double exact = diagrams::moment_hermite(cfg.m, p);
    double quad = 0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      quad += rule.weights[i] * std::pow(hermite::eval_hermite(cfg.m, rule.nodes[i]), p);
    const auto bound = tails::moment_bound(cfg.m, p / 2, hermite::factorial(cfg.m));
    const bool pass = std::abs(exact - quad) <= 1e-9 * std::max(1.0, std::abs(quad)) &&
                      exact <= bound.complete_count_bound * (1 + 1e-12) &&
                      bound.complete_count_bound <= bound.double_factorial_bound * (1 + 1e-12);
    s.add("moment_m" + std::to_string(cfg.m) + "_p" + std::to_string(p), pass);
    csv.new_row()
        .cell(cfg.m)
        .cell(p)
        .cell(exact)
        .cell(quad)
        .cell(bound.complete_count_bound)
        .cell(bound.double_factorial_bound)
        .cell(pass);
  }
}

// ---------------------------------------------------------------------------

diagrams::GridKernel profile_kernel(std::shared_ptr<const chaos::RegularSystem> sys,
                                    int arity, int variant) {
  // Hermitian product kernels built from a few lattice harmonics
  return diagrams::GridKernel::from_function(
      sys, arity, [variant](std::span<const double> pts) {
        std::complex<double> v = 1.0;
        const std::size_t n = pts.size();
        for (std::size_t a = 0; a < n; ++a) {
          const double x = pts[a];
          std::complex<double> g =
              std::polar(1.0, x) + 0.4 * std::polar(1.0, 2.0 * x + 0.0);
          if (variant == 1) g += 0.2 * std::polar(1.0, 3.0 * x);
          if (variant == 2) g = std::polar(1.0, 2.0 * x) + 0.7 * std::polar(1.0, x);
          v *= g;
        }
        return v;
      });
}

void suite_chaos(const RunConfig& cfg, Suite& s, CsvTable& csv) {
  const auto model = model_from(cfg);
  const int cells = 1024;
  const auto g = spectral::density_from_model(model, cells);
  const CounterRng rng(cfg.seed);

  // one exported realization plus the system descriptor in the manifest
  {
    const auto sys = chaos::build_regular_system(g, 16);
    const auto w = chaos::sample_realization(sys, rng.sub(99), 0);
    CsvTable table({"j", "center", "mass", "re_z", "im_z"});
    for (int j = 1; j <= sys->pairs(); ++j) {
      double c[2];
      sys->center(j, c);
      table.new_row().cell(j).cell(c[0]).cell(sys->mass_of(j))
          .cell(w.value(j).real()).cell(w.value(j).imag());
    }
    s.write_artifact("realization_sample.csv", table);
    s.extra["system"] = {{"nu", sys->nu},
                         {"resolution", sys->resolution},
                         {"pairs", sys->pairs()},
                         {"half_width", sys->half_width},
                         {"realization_seed", cfg.seed}};
  }

  // isometry / orthogonality at a small system
  {
    const auto sys = chaos::build_regular_system(g, 16);
    std::vector<diagrams::GridKernel> kernels;
    for (int n = 1; n <= 3; ++n) kernels.push_back(profile_kernel(sys, n, n - 1));
    const int reps = static_cast<int>(cfg.reps);
    std::vector<std::vector<double>> vals(3, std::vector<double>(reps));
    parallel_for_replicates(reps, cfg.workers, [&](int r) {
      const auto w = chaos::sample_realization(sys, rng, static_cast<std::uint64_t>(r));
      for (int n = 0; n < 3; ++n) vals[n][r] = chaos::integrate(kernels[n], w);
    });
    for (int n = 0; n < 3; ++n) {
      const double target = hermite::factorial(n + 1) * kernels[n].sym().norm2();
      const double var = sample_variance(vals[n]);
      const double se = se_of_variance(vals[n]);
      const double z = std::abs(var - target) / se;
      s.add("isometry_n" + std::to_string(n + 1), z <= 4,
            "var " + format_double(var) + " target " + format_double(target));
      csv.new_row().cell("isometry").cell(n + 1).cell(var).cell(target).cell(se).cell(z).cell(z <= 4);
      const double zm = std::abs(sample_mean(vals[n])) / se_of_mean(vals[n]);
      s.add("zero_mean_n" + std::to_string(n + 1), zm <= 4);
      csv.new_row().cell("zero_mean").cell(n + 1).cell(sample_mean(vals[n])).cell(0.0)
          .cell(se_of_mean(vals[n])).cell(zm).cell(zm <= 4);
    }
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b) {
        double cov = 0;
        for (int r = 0; r < reps; ++r) cov += vals[a][r] * vals[b][r];
        cov /= reps;
        std::vector<double> prod(reps);
        for (int r = 0; r < reps; ++r) prod[r] = vals[a][r] * vals[b][r];
        const double se = se_of_mean(prod);
        const double z = std::abs(cov) / se;
        s.add("cross_order_" + std::to_string(a + 1) + std::to_string(b + 1), z <= 4);
        csv.new_row().cell("cross_order").cell(10 * (a + 1) + b + 1).cell(cov).cell(0.0)
            .cell(se).cell(z).cell(z <= 4);
      }

    CsvTable samples({"replicate", "arity", "value"});
    for (int r = 0; r < std::min(reps, 200); ++r)
      for (int n = 0; n < 3; ++n)
        samples.new_row().cell(r).cell(n + 1).cell(vals[n][r]);
    s.write_artifact("integral_samples.csv", samples);
  }

  // Hermite product identity under refinement, coupled by aggregation. The
  // per-draw defect is a quadratic fluctuation, so the decay is asserted on
  // the mean absolute defect over coupled draws.
  {
    const int finest = std::min(cfg.grid, 64);
    const auto fine_sys = chaos::build_regular_system(g, finest);
    const int ndraws = 48;
    for (int n : {2, 3}) {
      double prev = -1;
      bool shrinking = true;
      double mean_diff = 0;
      for (int res = 8; res <= finest; res *= 2) {
        const auto sys = chaos::build_regular_system(g, res);
        // equal per-cell participation keeps the defect at its lower bound
        diagrams::GridKernel phi(sys, 1);
        for (int j = 1; j <= sys->pairs(); ++j) {
          double c[2];
          sys->center(j, c);
          const double amp = 1.0 / std::sqrt(2.0 * sys->pairs() * sys->mass_of(j));
          phi.set_value(std::vector<int>{j}, std::polar(amp, c[0]));
          phi.set_value(std::vector<int>{-j}, std::polar(amp, -c[0]));
        }
        phi = phi.scaled(1.0 / std::sqrt(phi.norm2()));
        double acc = 0;
        for (int r = 0; r < ndraws; ++r) {
          const auto omega_fine = chaos::sample_realization(fine_sys, rng.sub(11), r);
          const auto omega = chaos::aggregate_to(omega_fine, sys);
          acc += chaos::ito_compare({phi}, {n}, omega).diff;
        }
        mean_diff = acc / ndraws;
        if (prev >= 0 && mean_diff > prev) shrinking = false;
        prev = mean_diff;
        csv.new_row().cell("ito_refinement").cell(n).cell(mean_diff).cell(0.0)
            .cell(static_cast<double>(res)).cell(0.0).cell(true);
      }
      s.add("ito_refinement_n" + std::to_string(n), shrinking,
            "finest mean defect " + format_double(mean_diff));
    }
  }

  // shift action and change of variables on a small system
  {
    const auto sys = chaos::build_regular_system(g, 16);
    auto f = profile_kernel(sys, 1, 0);
    const auto f0 = chaos::shift_kernel(f, {0.0});
    double d0 = 0;
    for (std::size_t i = 0; i < f.flat_size(); ++i)
      d0 = std::max(d0, std::abs(f.raw(i) - f0.raw(i)));
    const auto fab = chaos::shift_kernel(chaos::shift_kernel(f, {0.3}), {0.4});
    const auto fsum = chaos::shift_kernel(f, {0.7});
    double dd = 0;
    for (std::size_t i = 0; i < f.flat_size(); ++i)
      dd = std::max(dd, std::abs(fab.raw(i) - fsum.raw(i)));
    s.add("shift_identity_and_additivity", d0 == 0.0 && dd <= 1e-12);
    csv.new_row().cell("shift").cell(0).cell(dd).cell(0.0).cell(1e-12).cell(d0).cell(d0 == 0.0 && dd <= 1e-12);

    // change of variables: G' with masses scaled by |g|^2, g = |x|^{1/4}
    auto target = std::make_shared<chaos::RegularSystem>(*sys);
    std::vector<double> c(1);
    for (int j = 1; j <= sys->pairs(); ++j) {
      sys->center(j, c.data());
      target->mass[j - 1] = sys->mass_of(j) / std::sqrt(std::abs(c[0]));
    }
    const auto gfun = [](std::span<const double> x) {
      return std::complex<double>(std::pow(std::abs(x[0]), 0.25), 0.0);
    };
    const auto f2 = profile_kernel(sys, 2, 1);
    const auto f2p = chaos::change_of_variables(f2, gfun, target);
    const int reps = static_cast<int>(cfg.reps);
    std::vector<double> a1(reps), a2(reps);
    parallel_for_replicates(reps, cfg.workers, [&](int r) {
      const auto wa = chaos::sample_realization(sys, rng.sub(21), static_cast<std::uint64_t>(r));
      const auto wb = chaos::sample_realization(
          std::static_pointer_cast<const chaos::RegularSystem>(target), rng.sub(22),
          static_cast<std::uint64_t>(r));
      a1[r] = chaos::integrate(f2, wa);
      a2[r] = chaos::integrate(f2p, wb);
    });
    const double v1 = sample_variance(a1), v2 = sample_variance(a2);
    const double se = std::hypot(se_of_variance(a1), se_of_variance(a2));
    const double z = std::abs(v1 - v2) / se;
    s.add("change_of_variables_variance", z <= 4,
          format_double(v1) + " vs " + format_double(v2));
    csv.new_row().cell("change_of_variables").cell(2).cell(v1).cell(v2).cell(se).cell(z).cell(z <= 4);
  }
}

// ---------------------------------------------------------------------------

void suite_spectral(const RunConfig& cfg, Suite& s, CsvTable& csv) {
  const auto model = model_from(cfg);
  const auto g = spectral::density_from_model(model, 1 << 15);

  // exported density / correlation tables
  {
    CsvTable dens({"frequency", "mass"});
    const int stride = g.cells / 2048;
    for (int i = 0; i < g.cells; i += stride)
      dens.new_row().cell(g.center1(i)).cell(g.mass[i]);
    s.write_artifact("density.csv", dens);
    CsvTable corr({"n", "r"});
    for (long n = 0; n <= 256; n += 4)
      corr.new_row().cell(static_cast<int>(n))
          .cell(spectral::correlation_from_density(g, {n}));
    s.write_artifact("correlation.csv", corr);
  }

  // log-log slope of r(n)
  {
    std::vector<double> lx, ly;
    for (long n = 32; n <= 256; n += 16) {
      lx.push_back(std::log(static_cast<double>(n)));
      ly.push_back(std::log(spectral::correlation_from_density(g, {n})));
    }
    const double slope = ls_slope(lx, ly);
    const bool pass = std::abs(slope + cfg.alpha) <= 0.05;
    s.add("correlation_slope", pass, "slope " + format_double(slope));
    csv.new_row().cell("correlation_slope").cell(slope).cell(-cfg.alpha).cell(0.05)
        .cell(std::abs(slope + cfg.alpha)).cell(pass);
  }

  // homogeneity of the rescaled measure
  {
    const auto gn = spectral::rescale(g, 512.0, model);
    const double base = spectral::measure_interval(gn, 0.5, 1.0);
    for (double t : {2.0, 4.0}) {
      const double scaled = spectral::measure_interval(gn, 0.5 * t, 1.0 * t);
      const double ratio = scaled / base;
      const double target = std::pow(t, cfg.alpha);
      const bool pass = std::abs(ratio / target - 1.0) <= 0.02;
      s.add("homogeneity_t" + std::to_string(static_cast<int>(t)), pass);
      csv.new_row().cell("homogeneity").cell(ratio).cell(target).cell(0.02)
          .cell(std::abs(ratio / target - 1.0)).cell(pass);
    }
  }

  // window identity at t in {0, 0.5}
  for (double t : {0.0, 0.5}) {
    const auto id = spectral::check_identity_84(model, {t}, 512, 1 << 15);
    const bool pass = id.abs_diff <= 1e-3 * std::max(1.0, std::abs(id.rhs));
    s.add("identity_t" + format_double(t), pass,
          "lhs " + format_double(id.lhs) + " rhs " + format_double(id.rhs));
    csv.new_row().cell("identity").cell(id.lhs).cell(id.rhs).cell(1e-3).cell(id.abs_diff).cell(pass);
  }

  // psi_N -> psi_0
  {
    std::vector<spectral::Vec> t;
    for (int p = 0; p < cfg.k; ++p) t.push_back({p == 0 ? 0.5 : -0.25});
    std::vector<int> grid = cfg.n_grid;
    if (grid.empty()) grid = {256, 1024, 4096};
    const auto psi = fields::psi_limit_check(model, cfg.k, t, grid);
    bool shrink = true;
    double prev = -1;
    for (std::size_t i = 0; i < psi.psi_n.size(); ++i) {
      const double d = std::abs(psi.psi_n[i] - psi.psi_0);
      if (prev >= 0 && d > 2.0 * prev) shrink = false;
      prev = d;
      csv.new_row().cell("psi").cell(psi.psi_n[i]).cell(psi.psi_0).cell(psi.psi_0_uncertainty)
          .cell(d).cell(true);
    }
    s.add("psi_convergence", shrink);
  }
}

// ---------------------------------------------------------------------------

void suite_renormalize(const RunConfig& cfg, Suite& s, CsvTable& csv) {
  const auto model = model_from(cfg);
  const fields::Regime regime =
      cfg.regime == "central" ? fields::Regime::central : fields::Regime::noncentral;
  const auto h = hermite::pure(cfg.k);
  const CounterRng rng(cfg.seed);

  std::vector<int> grid = cfg.n_grid;
  if (grid.empty()) grid = {128, 256, 512};

  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    const int N = grid[gi];
    const double a_n = regime == fields::Regime::central
                           ? std::pow(N, model.nu / 2.0)
                           : std::pow(N, model.nu - cfg.k * model.alpha / 2.0);
    const double exact = fields::variance_exact(model, h, N, a_n);

    const int reps = static_cast<int>(cfg.reps);
    std::vector<double> z(reps);
    if (model.nu != 1) throw ConfigError("nu", "renormalize suite is nu = 1");
    const fields::CirculantSampler1D sampler(model, N);
    const CounterRng sub = rng.sub(1000 + gi);
    parallel_for_replicates(reps, cfg.workers, [&](int r) {
      const auto x = sampler.sample(sub, static_cast<std::uint64_t>(r));
      double acc = 0;
      for (double v : x) acc += hermite::eval_hermite(cfg.k, v);
      z[r] = acc / a_n;
    });
    const auto rep = fields::limit_diagnostics(z);
    const double zvar = std::abs(rep.variance - exact) / rep.se_variance;
    const bool pass = zvar <= 4;
    s.add("variance_N" + std::to_string(N), pass,
          "mc " + format_double(rep.variance) + " exact " + format_double(exact));
    // one row per (N, statistic)
    csv.new_row().cell(N).cell("A_N").cell(a_n).cell(0.0).cell(0.0).cell(true);
    csv.new_row().cell(N).cell("mean").cell(rep.mean).cell(rep.se_mean).cell(0.0)
        .cell(std::abs(rep.mean) <= 4 * rep.se_mean);
    csv.new_row().cell(N).cell("variance").cell(rep.variance).cell(rep.se_variance)
        .cell(exact).cell(pass);
    csv.new_row().cell(N).cell("skewness").cell(rep.skewness).cell(rep.se_skewness)
        .cell(0.0).cell(true);
    csv.new_row().cell(N).cell("excess_kurtosis").cell(rep.excess_kurtosis)
        .cell(rep.se_kurtosis).cell(0.0).cell(true);
  }
}

// ---------------------------------------------------------------------------

void suite_fbm(const RunConfig& cfg, Suite& s, CsvTable& csv) {
  fbm::FbmSpec spec;
  spec.hurst = cfg.hurst;
  for (int i = 1; i <= cfg.grid; ++i) spec.grid.push_back(i / 8.0);
  const CounterRng rng(cfg.seed);

  // one exported path; the spec goes into the manifest
  {
    const auto path = fbm::simulate(spec, rng.sub(99), 0);
    CsvTable table({"t", "x"});
    for (std::size_t i = 0; i < spec.grid.size(); ++i)
      table.new_row().cell(spec.grid[i]).cell(path[i]);
    s.write_artifact("path_sample.csv", table);
    s.extra["fbm_spec"] = {{"hurst", spec.hurst},
                           {"scale", spec.scale},
                           {"grid_points", spec.grid.size()},
                           {"dt", spec.grid.size() > 1 ? spec.grid[1] - spec.grid[0] : 0.0}};
  }

  const double ss = fbm::check_self_similarity(spec, 2.0);
  const double si = std::max(fbm::check_stationary_increments(spec, 0.3),
                             fbm::check_stationary_increments(spec, 1.7));
  s.add("self_similarity", ss <= 1e-12);
  s.add("stationary_increments", si <= 1e-12);
  csv.new_row().cell("self_similarity").cell(0.0).cell(ss).cell(0.0).cell(1e-12).cell(ss <= 1e-12);
  csv.new_row().cell("stationary_increments").cell(0.0).cell(si).cell(0.0).cell(1e-12).cell(si <= 1e-12);

  // spectral-representation ratio constancy
  {
    double ratio0 = 0;
    double worst = 0;
    int idx = 0;
    for (auto [a, b] : std::vector<std::pair<double, double>>{
             {1.0, 1.0}, {2.0, 3.0}, {0.5, 2.5}, {1.5, 1.5}, {0.25, 3.0}}) {
      const double ratio = fbm::spectral_covariance(cfg.hurst, a, b) /
                           fbm::covariance(spec, a, b);
      if (idx++ == 0)
        ratio0 = ratio;
      else
        worst = std::max(worst, std::abs(ratio / ratio0 - 1.0));
    }
    s.add("spectral_ratio_constancy", worst <= 1e-3, "drift " + format_double(worst));
    csv.new_row().cell("spectral_ratio").cell(ratio0).cell(worst).cell(0.0).cell(1e-3).cell(worst <= 1e-3);
  }

  // MC covariance at probe pairs
  {
    const int n = static_cast<int>(spec.grid.size());
    std::vector<std::pair<int, int>> probes;
    for (int t = 0; t < 16; ++t)
      probes.emplace_back((t * 7) % n, (t * 13 + 5) % n);
    const std::int64_t reps = cfg.reps;
    const std::size_t dim = probes.size() + 2;
    const auto sums = blocked_accumulate(
        reps, cfg.workers, dim,
        [&](std::int64_t r, double* acc) {
          const auto path = fbm::simulate(spec, rng, static_cast<std::uint64_t>(r));
          for (std::size_t p = 0; p < probes.size(); ++p)
            acc[p] += path[probes[p].first] * path[probes[p].second];
          acc[probes.size()] += path[0];
          acc[probes.size() + 1] += path[0] * path[0];
        });
    double worst_z = 0;
    for (std::size_t p = 0; p < probes.size(); ++p) {
      const double emp = sums[p] / static_cast<double>(reps);
      const double target = fbm::covariance(spec, spec.grid[probes[p].first],
                                            spec.grid[probes[p].second]);
      // SE of a product-moment estimate: Var(XY) <= E X^2 Y^2 bounded via
      // Gaussianity: Var(XY) = R_ss R_tt + R_st^2
      const double vs = fbm::covariance(spec, spec.grid[probes[p].first], spec.grid[probes[p].first]);
      const double vt = fbm::covariance(spec, spec.grid[probes[p].second], spec.grid[probes[p].second]);
      const double se = std::sqrt((vs * vt + target * target) / static_cast<double>(reps));
      const double z = std::abs(emp - target) / se;
      worst_z = std::max(worst_z, z);
      csv.new_row().cell("covariance").cell(spec.grid[probes[p].first]).cell(emp).cell(target)
          .cell(se).cell(z).cell(z <= 4);
    }
    s.add("mc_covariance", worst_z <= 4, "worst z " + format_double(worst_z));
  }
}

// ---------------------------------------------------------------------------

// exact survival P(|H_m(xi)| > x) for m <= 3, the oracle the MC slope is
// judged against (finite-x slopes sit below the asymptotic 2/m)
double exact_survival(int m, double x) {
  const auto phi_bar = [](double t) { return 0.5 * std::erfc(t / std::sqrt(2.0)); };
  if (m == 1) return 2.0 * phi_bar(x);
  if (m == 2) {
    double p = 2.0 * phi_bar(std::sqrt(1.0 + x));
    if (x < 1.0) p += 1.0 - 2.0 * phi_bar(std::sqrt(1.0 - x));
    return p;
  }
  if (m == 3 && x > 2.0) {
    // positive root of t^3 - 3t = x
    double t = std::cbrt(x) + 1.0;
    for (int it = 0; it < 60; ++it) t -= (t * t * t - 3 * t - x) / (3 * t * t - 3);
    return 2.0 * phi_bar(t);
  }
  throw std::invalid_argument("exact_survival: unsupported order/range");
}

void suite_tails(const RunConfig& cfg, Suite& s, CsvTable& csv) {
  const CounterRng rng(cfg.seed);
  for (int m : cfg.m_list) {
    const auto tb = tails::tail_bound_params(m, hermite::factorial(m));
    const double xmax = m == 1 ? 4.2 : (m == 2 ? 16.0 : 55.0);
    std::vector<double> grid;
    for (int i = 0; i < 12; ++i)
      grid.push_back(tb.x0 * 1.05 * std::pow(xmax / (tb.x0 * 1.05), i / 11.0));
    const auto curve = tails::tail_empirical(m, grid, cfg.reps, rng.sub(m), cfg.workers);
    bool below = true;
    std::vector<double> lx, ly, oy, sig;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double p = curve.empirical[i];
      if (p > curve.bound[i]) below = false;
      if (p * static_cast<double>(cfg.reps) >= 25) {
        lx.push_back(std::log(grid[i]));
        ly.push_back(std::log(-std::log(p)));
        // delta-method sd of log(-log phat)
        sig.push_back(std::sqrt((1.0 - p) / (p * static_cast<double>(cfg.reps))) /
                      (-std::log(p)));
        if (m <= 3) oy.push_back(std::log(-std::log(exact_survival(m, grid[i]))));
      }
      csv.new_row().cell(m).cell(grid[i]).cell(p).cell(curve.bound[i])
          .cell(tb.k2).cell(0.0).cell(p <= curve.bound[i]);
    }
    s.add("below_bound_m" + std::to_string(m), below);
    if (lx.size() < 3) {
      s.add("slope_m" + std::to_string(m), false, "too few replicates for the fit");
      continue;
    }
    const auto fit = wls_slope(lx, ly, sig);
    const auto ofit = wls_slope(lx, oy, sig);
    // judged against the exact finite-x slope of the distribution; the
    // asymptotic power 2/m is approached only far beyond MC reach for m >= 2
    s.add("slope_vs_oracle_m" + std::to_string(m),
          std::abs(fit.slope - ofit.slope) <= std::max(0.05, 4.0 * fit.se),
          "slope " + format_double(fit.slope) + " oracle " +
              format_double(ofit.slope) + " se " + format_double(fit.se));
  }
}

// ---------------------------------------------------------------------------

std::vector<std::string> csv_header(const std::string& experiment) {
  if (experiment == "hermite-check") return {"check", "value", "tol", "pass"};
  if (experiment == "diagram-moments")
    return {"m", "p", "exact", "quadrature", "count_bound", "dfac_bound", "pass"};
  if (experiment == "chaos-verify")
    return {"check", "n", "value", "target", "se", "z", "pass"};
  if (experiment == "spectral-limit")
    return {"check", "value", "reference", "tol", "diff", "pass"};
  if (experiment == "renormalize")
    return {"N", "statistic", "value", "se", "reference", "pass"};
  if (experiment == "fbm")
    return {"check", "t", "value", "reference", "se", "z_or_tol", "pass"};
  if (experiment == "tails")
    return {"m", "x", "empirical", "bound", "k2", "unused", "pass"};
  throw ConfigError("experiment", "unknown experiment: " + experiment);
}

}  // namespace

void validate(const RunConfig& cfg) {
  csv_header(cfg.experiment);  // known experiment?
  if (cfg.nu != 1 && cfg.nu != 2) throw ConfigError("nu", "nu must be 1 or 2");
  const bool needs_model = cfg.experiment == "chaos-verify" ||
                           cfg.experiment == "spectral-limit" ||
                           cfg.experiment == "renormalize";
  if (needs_model && !(cfg.alpha > 0 && cfg.alpha < cfg.nu))
    throw ConfigError("alpha", "need 0 < alpha < nu");
  if (cfg.experiment == "fbm" && !(cfg.hurst > 0 && cfg.hurst < 1))
    throw ConfigError("hurst", "hurst must lie in (0,1)");
  if (cfg.reps < 1) throw ConfigError("reps", "reps must be positive");
  if (cfg.workers < 1 || cfg.workers > 256)
    throw ConfigError("workers", "workers must lie in [1,256]");
  if (cfg.experiment == "renormalize") {
    if (cfg.regime != "central" && cfg.regime != "noncentral")
      throw ConfigError("regime", "regime must be central or noncentral");
    if (cfg.regime == "noncentral" && cfg.k * cfg.alpha >= cfg.nu)
      throw ConfigError("regime",
                        "k*alpha >= nu: the noncentral limit integral diverges");
    if (cfg.k < 1) throw ConfigError("k", "k must be >= 1");
  }
  if (cfg.experiment == "chaos-verify" && cfg.grid != 8 && cfg.grid != 16 &&
      cfg.grid != 32 && cfg.grid != 64)
    throw ConfigError("grid", "chaos-verify resolution must be 8, 16, 32 or 64");
  if (cfg.experiment == "tails")
    for (int m : cfg.m_list)
      if (m < 1 || m > 4) throw ConfigError("m", "tails orders must lie in 1..4");
}

RunResult run(const RunConfig& cfg) {
  RunResult result;
  const auto t0 = std::chrono::steady_clock::now();

  fs::path out = cfg.out_dir;
  if (out.empty()) {
    const char* env = std::getenv("CHAOSLAB_OUT");
    out = env ? fs::path(env) : fs::path("chaoslab_out");
  }
  std::error_code ec;
  fs::create_directories(out, ec);

  json manifest;
  manifest["version"] = kVersion;
  manifest["experiment"] = cfg.experiment;
  manifest["config"] = {
      {"nu", cfg.nu},           {"alpha", cfg.alpha},   {"a_spec", cfg.a_spec},
      {"L_spec", cfg.L_spec},   {"hurst", cfg.hurst},   {"regime", cfg.regime},
      {"k", cfg.k},             {"n_grid", cfg.n_grid}, {"grid", cfg.grid},
      {"m", cfg.m},             {"max_rows", cfg.max_rows}, {"m_list", cfg.m_list},
      {"reps", cfg.reps},       {"seed", cfg.seed},     {"workers", cfg.workers}};

  Suite suite;
  suite.out = out;
  std::string error;
  std::string csv_path;
  try {
    validate(cfg);
    CsvTable csv(csv_header(cfg.experiment));
    if (cfg.experiment == "hermite-check") suite_hermite(cfg, suite, csv);
    else if (cfg.experiment == "diagram-moments") suite_diagram_moments(cfg, suite, csv);
    else if (cfg.experiment == "chaos-verify") suite_chaos(cfg, suite, csv);
    else if (cfg.experiment == "spectral-limit") suite_spectral(cfg, suite, csv);
    else if (cfg.experiment == "renormalize") suite_renormalize(cfg, suite, csv);
    else if (cfg.experiment == "fbm") suite_fbm(cfg, suite, csv);
    else if (cfg.experiment == "tails") suite_tails(cfg, suite, csv);
    csv_path = (out / ("results_" + cfg.experiment + ".csv")).string();
    csv.write(csv_path);
    result.csv_paths.push_back(csv_path);
    for (const auto& a : suite.artifacts) result.csv_paths.push_back(a);
  } catch (const ConfigError& e) {
    result.exit_code = 2;
    error = std::string("invalid config field '") + e.field + "': " + e.what();
  } catch (const std::exception& e) {
    result.exit_code = 1;
    error = e.what();
  }

  for (const auto& c : suite.checks) {
    if (!cfg.quiet)
      std::cout << (c.pass ? "[ok]   " : "[FAIL] ") << c.name
                << (c.detail.empty() ? "" : "  (" + c.detail + ")") << "\n";
    if (!c.pass) {
      result.failures.push_back(c.name);
      if (result.exit_code == 0) result.exit_code = 1;
    }
  }
  if (!error.empty()) {
    result.failures.push_back(error);
    if (!cfg.quiet) std::cout << "[FAIL] " << error << "\n";
  }

  const auto t1 = std::chrono::steady_clock::now();
  manifest["wall_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
  manifest["status"] = result.exit_code == 0 ? "pass" : "fail";
  manifest["failures"] = result.failures;
  manifest["csv"] = result.csv_paths;
  if (!suite.extra.is_null()) manifest["artifacts"] = suite.extra;

  result.manifest_path = (out / "manifest.json").string();
  std::ofstream mf(result.manifest_path, std::ios::binary);
  mf << manifest.dump(2) << "\n";
  return result;
}

}  // namespace cli
}  // namespace chaoslab
