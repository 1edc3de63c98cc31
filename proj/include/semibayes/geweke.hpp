#ifndef SEMIBAYES_GEWEKE_HPP_
#define SEMIBAYES_GEWEKE_HPP_

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "semibayes/design.hpp"
#include "semibayes/sampler.hpp"

namespace semibayes {

/// Joint draw of every latent and the response from the prior and model.
ChainState sample_joint_prior(const DesignMatrix &x, const ModelPriors &priors, Rng &rng,
                              Eigen::VectorXd *y);

/// Y given (theta, allocations, signs, atoms, sigma).
Eigen::VectorXd sample_response(const ChainState &state, const DesignMatrix &x, Rng &rng);

struct GewekeStatistic {
  std::string name;
  double marginal_mean = 0.0;
  double marginal_se = 0.0;
  double successive_mean = 0.0;
  double successive_se = 0.0;  // batch means
  double z = 0.0;
};

struct GewekeResult {
  std::vector<GewekeStatistic> stats;
  long cycles = 0;
  double max_abs_z() const;
  nlohmann::json to_json() const;
};

/// Marginal-conditional draws against the successive-conditional chain that
/// alternates one sampler sweep with a fresh response. Compares first and
/// second moments of sigma, |S| and the first atom. `sweep_priors`, when
/// given, replaces the priors seen by the sweep (a deliberately wrong sampler).
GewekeResult geweke_test(const DesignMatrix &x, const ModelPriors &priors,
                         const SamplerConfig &config, long cycles, std::uint64_t seed,
                         int batches = 50, const ModelPriors *sweep_priors = nullptr);

}  // namespace semibayes

#endif  // SEMIBAYES_GEWEKE_HPP_
