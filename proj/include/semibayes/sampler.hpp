#ifndef SEMIBAYES_SAMPLER_HPP_
#define SEMIBAYES_SAMPLER_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "semibayes/coef_prior.hpp"
#include "semibayes/data.hpp"
#include "semibayes/dpmix.hpp"
#include "semibayes/rng.hpp"

namespace semibayes {

enum class SamplerMode {
  kDp,             // symmetrized DP location mixture errors
  kFixedGaussian,  // errors frozen at N(0, fixed_sigma^2)
};

struct SamplerConfig {
  int sweeps = 6000;
  int burn_in = 1000;
  int thin = 1;
  int flips_per_sweep = 200;  // all coordinates when p <= flips_per_sweep
  double log_sigma_step = 0.1;
  SamplerMode mode = SamplerMode::kDp;
  int density_every = 50;  // keep a full mixture snapshot every k stored draws
  int init_size = 1;       // start from the init_size largest marginal correlations
  int warmup_frozen = 0;   // leading burn-in sweeps with the support held fixed

  void validate() const;
  nlohmann::json to_json() const;
  static SamplerConfig from_json(const nlohmann::json &j);
};

struct ModelPriors {
  CoefPriorConfig coef;
  DpPriorConfig dp;
};

/// Complete latent state of one chain. Active coefficient values are held
/// aligned with `support`; `lasso_scales` are the normal scale-mixture
/// variances of the Laplace slab on the same coordinates.
struct ChainState {
  Support support;
  Eigen::VectorXd values;
  Eigen::VectorXd lasso_scales;
  Eigen::VectorXi alloc;  // component index per observation, 0-based
  Eigen::VectorXi sign;   // +1 / -1 per observation
  Eigen::VectorXd sticks;  // stick proportions v_1..v_{H-1}
  SymmetrizedMixture mix;
  Rng rng;

  long sigma_proposals = 0;
  long sigma_accepts = 0;
  long flip_proposals = 0;
  long flip_changes = 0;
  long jitter_events = 0;

  void validate(Eigen::Index n) const;
};

/// Y - X_S theta_S.
Eigen::VectorXd residuals(const ChainState &state, const Dataset &data);
/// Y - t_i z_{c_i}: the response once the error location is conditioned on.
Eigen::VectorXd pseudo_response(const ChainState &state, const Dataset &data);

/// Support starts at the `init_size` columns with the largest absolute
/// marginal correlation (capped at the prior size limit), values from least
/// squares on that support.
ChainState init(const Dataset &data, const ModelPriors &priors,
                const SamplerConfig &config, std::uint64_t seed);

void update_signs_allocs(ChainState &state, const Dataset &data);
void update_atoms(ChainState &state, const Dataset &data, const ModelPriors &priors);
void update_sticks(ChainState &state, const ModelPriors &priors);
void update_sigma(ChainState &state, const Dataset &data, const ModelPriors &priors,
                  const SamplerConfig &config);
void update_lasso_scales(ChainState &state, const ModelPriors &priors);
void update_model(ChainState &state, const Dataset &data, const ModelPriors &priors,
                  const SamplerConfig &config);
void update_theta(ChainState &state, const Dataset &data, const ModelPriors &priors);

/// One full sweep in the fixed order signs/allocations, atoms, sticks, sigma,
/// lasso scales, support flips, coefficient redraw. `flips = false` skips the
/// support update.
void sweep(ChainState &state, const Dataset &data, const ModelPriors &priors,
           const SamplerConfig &config, bool flips = true);

/// Log marginal likelihood of support `s` with the coefficients integrated
/// against N(0, diag(scales)), up to terms common to every support.
double log_marginal(const Dataset &data, const Eigen::VectorXd &pseudo, double sigma,
                    const Support &s, const Eigen::VectorXd &scales,
                    long *jitter_events = nullptr);

/// Probability that a Gibbs update of coordinate j changes its inclusion state,
/// given the lasso scale `scale_j` used for j when it is active.
double flip_probability(const ChainState &state, const Dataset &data,
                        const ModelPriors &priors, int j, double scale_j);

struct GaussianConditional {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};
/// Exact normal full conditional of theta_S given everything else.
GaussianConditional theta_conditional(const ChainState &state, const Dataset &data);

double log_posterior(const ChainState &state, const Dataset &data, const ModelPriors &priors,
                     const SamplerConfig &config);

struct ChainSample {
  int iteration = 0;
  Support support;
  Eigen::VectorXd values;
  double sigma = 0.0;
  int occupied = 0;  // number of components with at least one observation
  double first_atom = 0.0;
  double log_post = 0.0;
  std::optional<SymmetrizedMixture> mixture;
};

struct ChainOutput {
  std::vector<ChainSample> samples;
  double sigma_acceptance = 0.0;
  double flip_rate = 0.0;
  long jitter_events = 0;
  std::uint64_t data_hash = 0;
  std::uint64_t seed = 0;
  SamplerConfig config;
};

ChainOutput run_chain(const Dataset &data, const ModelPriors &priors,
                      const SamplerConfig &config, std::uint64_t seed);

// Columnar chain CSV: iteration,size,support,theta,sigma,log_post with the
// support and values ';'-separated, plus a JSON sidecar with rates and config.
void write_chain_csv(const ChainOutput &chain, const std::filesystem::path &path);
ChainOutput read_chain_csv(const std::filesystem::path &path);
nlohmann::json chain_sidecar(const ChainOutput &chain, const ModelPriors &priors);

}  // namespace semibayes

#endif  // SEMIBAYES_SAMPLER_HPP_
