#ifndef SEMIBAYES_ERROR_DENSITY_HPP_
#define SEMIBAYES_ERROR_DENSITY_HPP_

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "semibayes/rng.hpp"

namespace semibayes {

enum class ErrorFamily {
  kGaussian,
  kSymmetrizedTwoPointNormal,
  kPowerExponential,
  kFiniteGaussianMixture,
  kDegenerate,  // point mass at zero; only for noiseless test data
};

/// Tail, smoothness and score-growth constants attached to a true density.
/// Smoothness `beta` and the (D1)/(D3) function-class data are documentation;
/// the remaining constants are checked numerically by check_conditions.
struct DensityMetadata {
  double beta = 0.0;
  double tau = 2.0;       // tail exponent: eta(x) <= exp(-tail_b |x|^tau), |x| > tail_a
  double tail_a = 0.0;
  double tail_b = 0.5;
  double gamma1 = 1.0;    // score growth exponents
  double gamma2 = 0.0;
  double gamma3 = 0.0;
  double c_eta0 = 1.0;
  double ratio_b = 0.1;   // density-ratio bound exp(ratio_b |y|^ratio_tau)
  double ratio_tau = 1.0;
  double tau0 = 0.0;
};

class ErrorDensitySpec {
 public:
  static ErrorDensitySpec gaussian(double sigma);
  static ErrorDensitySpec symmetrized_two_point_normal(double z0, double sigma);
  /// Density proportional to exp(-a |y|^b), b >= 2. When b is not an even
  /// integer |y|^b is replaced by (y^2 + delta^2)^{b/2}.
  static ErrorDensitySpec power_exponential(double a, double b, double delta = 1e-3);
  /// Symmetric mixture sum_k w_k [phi_s(y - m_k) + phi_s(y + m_k)] / 2.
  static ErrorDensitySpec finite_gaussian_mixture(std::vector<double> weights,
                                                  std::vector<double> locations,
                                                  double sigma);
  static ErrorDensitySpec degenerate();

  ErrorFamily family() const { return family_; }
  const DensityMetadata &meta() const { return meta_; }
  DensityMetadata &meta() { return meta_; }
  const std::vector<double> &params() const { return params_; }
  bool smoothed() const { return smoothed_; }

  double log_density(double y) const;
  double density(double y) const;
  double score(double y) const;
  double score2(double y) const;
  double score3(double y) const;
  /// Variance of the law; used for reporting and initial scales.
  double variance() const;

  Eigen::VectorXd sample(Eigen::Index n, Rng &rng) const;

  nlohmann::json to_json() const;
  static ErrorDensitySpec from_json(const nlohmann::json &j);
  std::string name() const;

 private:
  ErrorFamily family_ = ErrorFamily::kGaussian;
  std::vector<double> params_;
  // mixture parts
  std::vector<double> weights_;
  std::vector<double> locations_;
  double log_norm_ = 0.0;  // power exponential: log of the normalizing integral
  bool smoothed_ = false;
  DensityMetadata meta_;

  void mixture_derivatives(double y, double *d1, double *d2, double *d3) const;
};

struct ConditionReport {
  bool normalized = false;
  bool symmetric = false;
  bool positive = false;
  bool tail_bound = false;
  bool score_growth1 = false;
  bool score_growth2 = false;
  bool score_growth3 = false;
  bool density_ratio = false;
  bool sub_gaussian_score = false;  // tau >= 2 gamma1
  double integral = 0.0;
  std::vector<std::string> failures;
  nlohmann::json to_json() const;
};

/// Grid certificate for the tail, score-growth and density-ratio conditions.
ConditionReport check_conditions(const ErrorDensitySpec &spec,
                                 const Eigen::VectorXd &grid);
Eigen::VectorXd default_condition_grid();

}  // namespace semibayes

#endif  // SEMIBAYES_ERROR_DENSITY_HPP_
