#ifndef SEMIBAYES_ORACLE_HPP_
#define SEMIBAYES_ORACLE_HPP_

#include <map>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "semibayes/coef_prior.hpp"
#include "semibayes/data.hpp"
#include "semibayes/sampler.hpp"

namespace semibayes {

inline constexpr Eigen::Index kOracleMaxP = 6;
inline constexpr Eigen::Index kOracleMaxModelSize = 3;

/// log P(X > 0) for X ~ N(mean, cov). Nested one-dimensional conditioning
/// quadrature in log space, so tiny probabilities keep full relative accuracy.
/// Cost grows geometrically with the dimension; meant for dimension <= 3.
double log_orthant_probability(const Eigen::VectorXd &mean, const Eigen::MatrixXd &cov);

/// Mean and covariance of N(mean, cov) restricted to the positive orthant.
struct TruncatedMoments {
  double log_prob = 0.0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};
TruncatedMoments positive_orthant_moments(const Eigen::VectorXd &mean,
                                          const Eigen::MatrixXd &cov);

struct ModelPosterior {
  Support support;
  bool skipped = false;      // |S| above the integration limit
  double log_evidence = 0.0;  // log int exp(L_n) g_S d theta_S, closed form
  double log_prior = 0.0;     // log pi_p(|S|) - log C(p, |S|)
  double prob = 0.0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  // Independent evaluation by nested adaptive Gauss-Kronrod quadrature.
  double quad_log_evidence = 0.0;
  Eigen::VectorXd quad_mean;
  Eigen::MatrixXd quad_cov;
};

struct OracleResult {
  std::vector<ModelPosterior> models;
  double sigma = 1.0;
  bool complete = true;  // false when some model was skipped
  bool cross_checked = false;

  std::map<Support, double> model_probs() const;
  const ModelPosterior *find(const Support &s) const;
  /// Largest dual-method disagreement over log-evidence, means and covariances.
  /// NaN when the cross-check was not run.
  double method_gap() const;
  nlohmann::json to_json() const;
};

/// Exact posterior over all supports for Gaussian errors N(0, sigma^2) with the
/// spike-and-slab Laplace coefficient prior. Requires p <= 6.
OracleResult exact_posterior(const Dataset &data, const CoefPriorConfig &prior, double sigma,
                             bool cross_check = true);

using ModelDistribution = std::map<Support, double>;

ModelDistribution model_frequencies(const std::vector<ChainSample> &samples);
/// 1/2 sum_S |P(S) - Q(S)|.
double tv_distance(const ModelDistribution &a, const ModelDistribution &b);
double compare_to_chain(const OracleResult &oracle, const ChainOutput &chain);

}  // namespace semibayes

#endif  // SEMIBAYES_ORACLE_HPP_
