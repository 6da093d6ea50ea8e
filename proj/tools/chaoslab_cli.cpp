// Batch harness for the verification suites. Subcommands mirror the suites;
// flags override values from an optional JSON config file.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "chaoslab/runner.hpp"

namespace {

using chaoslab::cli::RunConfig;

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw chaoslab::cli::ConfigError("config", "cannot open config file " + path);
  nlohmann::json j;
  f >> j;
  if (j.contains("nu")) cfg.nu = j["nu"];
  if (j.contains("alpha")) cfg.alpha = j["alpha"];
  if (j.contains("a_spec")) cfg.a_spec = j["a_spec"];
  if (j.contains("L_spec")) cfg.L_spec = j["L_spec"];
  if (j.contains("hurst")) cfg.hurst = j["hurst"];
  if (j.contains("regime")) cfg.regime = j["regime"];
  if (j.contains("k")) cfg.k = j["k"];
  if (j.contains("N")) cfg.n_grid = j["N"].get<std::vector<int>>();
  if (j.contains("grid")) cfg.grid = j["grid"];
  if (j.contains("m")) cfg.m = j["m"];
  if (j.contains("max_rows")) cfg.max_rows = j["max_rows"];
  if (j.contains("m_list")) cfg.m_list = j["m_list"].get<std::vector<int>>();
  if (j.contains("reps")) cfg.reps = j["reps"];
  if (j.contains("seed")) cfg.seed = j["seed"];
  if (j.contains("workers")) cfg.workers = j["workers"];
  if (j.contains("out")) cfg.out_dir = j["out"];
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chaoslab: batch verification suites for spectral chaos machinery"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_file;
  std::string n_list;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_file, "JSON config file (flags win)");
    sub->add_option("--seed", cfg.seed, "base seed for the counter RNG");
    sub->add_option("--reps", cfg.reps, "replicate count");
    sub->add_option("--workers", cfg.workers, "worker threads (speed only)");
    sub->add_option("--out", cfg.out_dir, "output directory (default $CHAOSLAB_OUT)");
    sub->add_flag("--quiet", cfg.quiet, "suppress per-check lines");
  };

  auto* hermite = app.add_subcommand("hermite-check", "Hermite system checks");
  add_common(hermite);

  auto* diag = app.add_subcommand("diagram-moments", "moments vs quadrature oracles");
  diag->add_option("--m", cfg.m, "chaos order");
  diag->add_option("--max-rows", cfg.max_rows, "largest power");
  add_common(diag);

  auto* chaos = app.add_subcommand("chaos-verify", "isometry / product identity / shift / change of variables");
  chaos->add_option("--alpha", cfg.alpha, "decay exponent");
  chaos->add_option("--resolution", cfg.grid, "finest regular-system resolution");
  add_common(chaos);

  auto* spectral = app.add_subcommand("spectral-limit", "rescaled-measure limits");
  spectral->add_option("--alpha", cfg.alpha, "decay exponent");
  spectral->add_option("--k", cfg.k, "number of shift factors");
  spectral->add_option("--N", n_list, "comma-separated N grid");
  add_common(spectral);

  auto* renorm = app.add_subcommand("renormalize", "block-sum cumulant tables");
  renorm->add_option("--nu", cfg.nu, "lattice dimension");
  renorm->add_option("--alpha", cfg.alpha, "decay exponent");
  renorm->add_option("--k", cfg.k, "Hermite rank");
  renorm->add_option("--regime", cfg.regime, "noncentral or central");
  renorm->add_option("--N", n_list, "comma-separated N grid");
  add_common(renorm);

  auto* fbm = app.add_subcommand("fbm", "fractional Brownian motion checks");
  fbm->add_option("--hurst", cfg.hurst, "Hurst parameter");
  fbm->add_option("--grid", cfg.grid, "grid points");
  add_common(fbm);

  auto* tails = app.add_subcommand("tails", "tail bounds vs MC survival");
  tails->add_option("--m", cfg.m_list, "chaos orders")->delimiter(',');
  add_common(tails);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "invalid config: " << e.what() << "\n";
    return 2;
  }

  cfg.experiment = app.get_subcommands().front()->get_name();

  try {
    if (!config_file.empty()) {
      RunConfig from_file = cfg;
      apply_config_file(from_file, config_file);
      // overlay: file values first, then any flag the user actually passed
      auto* sub = app.get_subcommands().front();
      RunConfig merged = from_file;
      if (sub->count("--seed")) merged.seed = cfg.seed;
      if (sub->count("--reps")) merged.reps = cfg.reps;
      if (sub->count("--workers")) merged.workers = cfg.workers;
      if (sub->count("--out")) merged.out_dir = cfg.out_dir;
      if (sub->get_option_no_throw("--alpha") && sub->count("--alpha")) merged.alpha = cfg.alpha;
      if (sub->get_option_no_throw("--nu") && sub->count("--nu")) merged.nu = cfg.nu;
      if (sub->get_option_no_throw("--k") && sub->count("--k")) merged.k = cfg.k;
      if (sub->get_option_no_throw("--regime") && sub->count("--regime")) merged.regime = cfg.regime;
      if (sub->get_option_no_throw("--hurst") && sub->count("--hurst")) merged.hurst = cfg.hurst;
      if (sub->get_option_no_throw("--grid") && sub->count("--grid")) merged.grid = cfg.grid;
      if (sub->get_option_no_throw("--resolution") && sub->count("--resolution")) merged.grid = cfg.grid;
      if (sub->get_option_no_throw("--m") && sub->count("--m")) { merged.m = cfg.m; merged.m_list = cfg.m_list; }
      if (sub->get_option_no_throw("--max-rows") && sub->count("--max-rows")) merged.max_rows = cfg.max_rows;
      merged.experiment = cfg.experiment;
      merged.quiet = cfg.quiet;
      cfg = merged;
    }
    if (!n_list.empty()) {
      cfg.n_grid.clear();
      std::size_t pos = 0;
      while (pos < n_list.size()) {
        std::size_t next = n_list.find(',', pos);
        if (next == std::string::npos) next = n_list.size();
        cfg.n_grid.push_back(std::stoi(n_list.substr(pos, next - pos)));
        pos = next + 1;
      }
    }
    const auto result = chaoslab::cli::run(cfg);
    if (result.exit_code != 0 && !result.failures.empty())
      std::cerr << (result.exit_code == 2 ? "" : "failed checks: ")
                << result.failures.front() << "\n";
    return result.exit_code;
  } catch (const chaoslab::cli::ConfigError& e) {
    std::cerr << "invalid config field '" << e.field << "': " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
