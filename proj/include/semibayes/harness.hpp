#ifndef SEMIBAYES_HARNESS_HPP_
#define SEMIBAYES_HARNESS_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "semibayes/coef_prior.hpp"
#include "semibayes/data.hpp"
#include "semibayes/design.hpp"
#include "semibayes/dpmix.hpp"
#include "semibayes/error_density.hpp"
#include "semibayes/sampler.hpp"

namespace semibayes {

enum class BetaMinRule {
  kConstant,  // every active coefficient has magnitude `value`
  kScaled,    // magnitude value * sqrt(s0 log p / n)
};

struct TruthSpec {
  int s0 = 3;
  BetaMinRule rule = BetaMinRule::kConstant;
  double value = 1.0;
  bool alternating_signs = true;
  ErrorDensitySpec error = ErrorDensitySpec::gaussian(1.0);

  double magnitude(Eigen::Index n, Eigen::Index p) const;
};

/// One simulation scenario. JSON layout:
///
///   name, replications, master_seed, output_dir,
///   design    {kind: iid_gaussian | equicorrelated | identity_block, rho, n: [..],
///              p_factor (p = round(p_factor n)) or p (fixed)},
///   truth     {s0, beta_min: {rule: constant | scaled, value}, signs: alternating | positive,
///              error: error-density block},
///   coef_prior{A4, lambda: small | large | number, max_size},
///   dpmix     {alpha_mass, base_scale, trunc_mode, Cprime, tau, m0, a0, b0, H, fixed_sigma},
///   sampler   {sweeps, burn_in, thin, flips_per_sweep, log_sigma_step, mode, density_every,
///              init_size, warmup_frozen}
struct ScenarioConfig {
  std::string name = "scenario";
  DesignSpec design;
  std::vector<Eigen::Index> n_values;
  double p_factor = 2.0;
  Eigen::Index p_fixed = 0;  // used when positive
  TruthSpec truth;
  nlohmann::json coef_prior = nlohmann::json::object();
  DpPriorConfig dp;
  SamplerConfig sampler;
  int replications = 1;
  std::uint64_t master_seed = 1;
  std::filesystem::path output_dir = "runs/scenario";

  Eigen::Index p_for(Eigen::Index n) const;
  ModelPriors priors_for(Eigen::Index n) const;
  /// Throws ConfigError naming the first violated rule.
  void validate() const;
  nlohmann::json to_json() const;
  static ScenarioConfig from_json(const nlohmann::json &j);
  static ScenarioConfig load(const std::filesystem::path &path);
  /// FNV-1a over the canonical JSON dump, output_dir excluded.
  std::uint64_t hash() const;
};

/// Seeds depend on (n, replication) only, so cells are shared between runs
/// that list different n values.
std::uint64_t cell_index(Eigen::Index n, int rep);

struct GeneratedData {
  Dataset data;
  Eigen::VectorXd theta0;
  Eigen::VectorXd eps;
  ErrorDensitySpec eta0;
  nlohmann::json info;  // lambda ||theta0||_1 / (s0 log p), entry bound, beta-min
};

GeneratedData gen_dataset(const ScenarioConfig &config, Eigen::Index n, int rep);

struct CellResult {
  Eigen::Index n = 0;
  int rep = 0;
  bool skipped = false;  // metrics already on disk
  bool failed = false;
  std::string error;
};

std::filesystem::path cell_dir(const std::filesystem::path &run_dir, Eigen::Index n, int rep);

/// Runs one cell into `dir`: chain.csv, chain.json, truth.json, metrics.json.
/// A cell whose metrics.json exists is left untouched.
CellResult run_cell(const ScenarioConfig &config, Eigen::Index n, int rep,
                    const std::filesystem::path &dir);

/// Worker count from SEMIBAYES_WORKERS, else hardware concurrency.
int default_workers();

/// Runs every (n, replication) cell with a bounded worker pool and writes
/// manifest.json. Per-cell failures are logged to the cell's error.txt.
std::vector<CellResult> replicate(const ScenarioConfig &config, int workers = 0);

/// Reads a completed (or partial) run directory and writes the report CSVs:
/// errors.csv, dimension.csv, hellinger.csv, selection.csv, bvm.csv,
/// coverage.csv and summary.csv. Missing cells appear with NA markers.
/// Returns the list of files written.
std::vector<std::filesystem::path> report(const std::filesystem::path &run_dir);

}  // namespace semibayes

#endif  // SEMIBAYES_HARNESS_HPP_
