#ifndef SEMIBAYES_DPMIX_HPP_
#define SEMIBAYES_DPMIX_HPP_

#include <optional>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "semibayes/rng.hpp"

namespace semibayes {

enum class TruncationMode {
  kLinear,  // atoms on [-C' n, C' n]
  kBvm,     // atoms on [-C' (log n)^{2/tau}, C' (log n)^{2/tau}], sigma^2 <= C' log n
};

struct DpPriorConfig {
  double alpha_mass = 1.0;
  double base_scale = 1.0;  // standard deviation of the truncated-normal base
  TruncationMode trunc_mode = TruncationMode::kLinear;
  double c_prime = 1.0;
  double tau = 2.0;  // tail exponent used by the bvm half-width
  int m0 = 2;        // sigma^{m0} ~ IG(a0, b0)
  double a0 = 3.0;
  double b0 = 2.0;
  int truncation = 50;  // H
  std::optional<double> fixed_sigma;

  /// Half-width W of the base support for sample size n.
  double half_width(Eigen::Index n) const;
  /// Upper end of the sigma^2 support; +inf outside bvm mode.
  double sigma2_upper(Eigen::Index n) const;
  void validate() const;

  nlohmann::json to_json() const;
  static DpPriorConfig from_json(const nlohmann::json &j);
};

/// H >= ceil(c2 * s log p / log n), never below `floor_h`.
int truncation_rule(double c2, double s, double p, double n, int floor_h = 50);

/// Truncated stick-breaking mixture evaluated through the symmetrized law
/// eta(y) = sum_h w_h [phi_s(y - z_h) + phi_s(y + z_h)] / 2.
struct SymmetrizedMixture {
  Eigen::VectorXd weights;
  Eigen::VectorXd atoms;
  double sigma = 1.0;

  Eigen::Index size() const { return weights.size(); }
  void validate() const;
};

/// Beta(1, alpha) sticks; the last stick takes the remaining mass exactly.
Eigen::VectorXd stick_breaking(double alpha_mass, int truncation, Rng &rng);
/// Weights from given stick proportions v_1..v_{H-1} (v_H = 1 implied).
Eigen::VectorXd weights_from_sticks(const Eigen::VectorXd &sticks, int truncation);

/// sigma from sigma^{m0} ~ IG(a0, b0), restricted to sigma^2 <= upper.
double sample_sigma_prior(const DpPriorConfig &config, Eigen::Index n, Rng &rng);
double log_sigma_prior(const DpPriorConfig &config, double sigma);
double sample_base_atom(const DpPriorConfig &config, Eigen::Index n, Rng &rng);

SymmetrizedMixture sample_prior(const DpPriorConfig &config, Eigen::Index n, Rng &rng);

double log_eval(const SymmetrizedMixture &mix, double y);
double eval(const SymmetrizedMixture &mix, double y);
/// d/dy log eta(y).
double score(const SymmetrizedMixture &mix, double y);
double log_lik(const SymmetrizedMixture &mix,
               const Eigen::Ref<const Eigen::VectorXd> &residuals);

}  // namespace semibayes

#endif  // SEMIBAYES_DPMIX_HPP_
