#ifndef SEMIBAYES_COEF_PRIOR_HPP_
#define SEMIBAYES_COEF_PRIOR_HPP_

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "semibayes/design.hpp"

namespace semibayes {

/// Coefficient vector stored as (support, nonzero values).
struct SparseCoefficient {
  Support support;
  Eigen::VectorXd values;

  std::size_t size() const { return support.size(); }
  /// Throws ParameterError unless indices are sorted, unique, in [0, p) and
  /// every value is nonzero.
  void validate(Eigen::Index p) const;
  Eigen::VectorXd dense(Eigen::Index p) const;
  static SparseCoefficient from_dense(const Eigen::VectorXd &theta);
};

enum class LambdaRegime { kSmall, kLarge };

/// sqrt(n)/p for the small regime, sqrt(n log p) for the large one.
double default_lambda(Eigen::Index n, Eigen::Index p, LambdaRegime regime);

/// pi_p(s) proportional to p^{-A4 s} on s = 0..max_size, uniform over supports
/// of each size, and an i.i.d. Laplace(lambda) slab.
struct CoefPriorConfig {
  double a4 = 2.0;
  double lambda = 1.0;
  Eigen::Index p = 1;
  Eigen::Index n = 1;
  Eigen::Index max_size = 1;  // hard cap on |S|

  static CoefPriorConfig make(Eigen::Index n, Eigen::Index p, double a4, double lambda);
  static CoefPriorConfig make(Eigen::Index n, Eigen::Index p, double a4, LambdaRegime regime);
  /// Block {"A4": .., "lambda": "small" | "large" | number}.
  static CoefPriorConfig from_json(const nlohmann::json &j, Eigen::Index n, Eigen::Index p);
  nlohmann::json to_json() const;

  void validate() const;
  bool lambda_in_range() const;

  double log_size_prior(Eigen::Index s) const;  // normalized log pi_p(s)
  double log_model_prior(Eigen::Index s) const;  // log pi_p(s) - log C(p, s)
  double log_slab(const Eigen::Ref<const Eigen::VectorXd> &values) const;
};

double log_binomial(Eigen::Index p, Eigen::Index k);

double log_prior(const SparseCoefficient &theta, const CoefPriorConfig &config);

}  // namespace semibayes

#endif  // SEMIBAYES_COEF_PRIOR_HPP_
