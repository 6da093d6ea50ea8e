#ifndef CHAOSLAB_RUNNER_HPP
#define CHAOSLAB_RUNNER_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace chaoslab {
namespace cli {

/// Batch experiment configuration; flags and config file both land here.
struct RunConfig {
  std::string experiment;  // hermite-check, diagram-moments, chaos-verify,
                           // spectral-limit, renormalize, fbm, tails
  int nu = 1;
  double alpha = 0.5;
  std::string a_spec = "const";
  std::string L_spec = "const";
  double hurst = 0.5;
  std::string regime = "noncentral";
  int k = 2;
  std::vector<int> n_grid;
  int grid = 64;  // fbm grid points / chaos resolution
  int m = 2;
  int max_rows = 4;
  std::vector<int> m_list{1, 2, 3};
  std::int64_t reps = 2000;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out_dir;  // empty: $CHAOSLAB_OUT or ./chaoslab_out
  bool quiet = false;
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& field_, const std::string& what_)
      : std::runtime_error(what_), field(field_) {}
  std::string field;
};

struct RunResult {
  int exit_code = 0;  // 0 pass, 1 check failed, 2 invalid config
  std::vector<std::string> failures;
  std::string manifest_path;
  std::vector<std::string> csv_paths;
};

void validate(const RunConfig& cfg);  // throws ConfigError

/// Runs the suite, writes results_<suite>.csv and manifest.json (the
/// manifest is written even when checks fail or the suite throws).
RunResult run(const RunConfig& cfg);

}  // namespace cli
}  // namespace chaoslab

#endif
