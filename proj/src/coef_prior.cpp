#include "semibayes/coef_prior.hpp"

#include <cmath>
#include <limits>

#include "semibayes/errors.hpp"

namespace semibayes {

void SparseCoefficient::validate(Eigen::Index p) const {
  if (static_cast<Eigen::Index>(support.size()) != values.size())
    throw ParameterError("sparse coefficient: support and values differ in length");
  if (static_cast<Eigen::Index>(support.size()) > p)
    throw ParameterError("sparse coefficient: |S| exceeds p");
  for (std::size_t k = 0; k < support.size(); ++k) {
    if (support[k] < 0 || support[k] >= p)
      throw ParameterError("sparse coefficient: index out of range");
    if (k > 0 && support[k] <= support[k - 1])
      throw ParameterError("sparse coefficient: support must be sorted and unique");
    if (values[static_cast<Eigen::Index>(k)] == 0.0)
      throw ParameterError("sparse coefficient: active value is zero");
  }
}

Eigen::VectorXd SparseCoefficient::dense(Eigen::Index p) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(p);
  for (std::size_t k = 0; k < support.size(); ++k)
    out[support[k]] = values[static_cast<Eigen::Index>(k)];
  return out;
}

SparseCoefficient SparseCoefficient::from_dense(const Eigen::VectorXd &theta) {
  SparseCoefficient c;
  std::vector<double> vals;
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    if (theta[j] != 0.0) {
      c.support.push_back(static_cast<int>(j));
      vals.push_back(theta[j]);
    }
  }
  c.values = Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
  return c;
}

double default_lambda(Eigen::Index n, Eigen::Index p, LambdaRegime regime) {
  if (n < 1 || p < 1) throw ParameterError("default_lambda: n and p must be positive");
  const double nn = static_cast<double>(n);
  const double pp = static_cast<double>(p);
  if (regime == LambdaRegime::kSmall) return std::sqrt(nn) / pp;
  return std::sqrt(nn * std::log(pp));
}

double log_binomial(Eigen::Index p, Eigen::Index k) {
  return std::lgamma(static_cast<double>(p) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(p - k) + 1.0);
}

CoefPriorConfig CoefPriorConfig::make(Eigen::Index n, Eigen::Index p, double a4,
                                      double lambda) {
  CoefPriorConfig c;
  c.n = n;
  c.p = p;
  c.a4 = a4;
  c.lambda = lambda;
  c.max_size = std::min<Eigen::Index>(p, std::max<Eigen::Index>(n / 2, 1));
  c.validate();
  return c;
}

CoefPriorConfig CoefPriorConfig::make(Eigen::Index n, Eigen::Index p, double a4,
                                      LambdaRegime regime) {
  return make(n, p, a4, default_lambda(n, p, regime));
}

CoefPriorConfig CoefPriorConfig::from_json(const nlohmann::json &j, Eigen::Index n,
                                           Eigen::Index p) {
  const double a4 = j.value("A4", 2.0);
  double lambda;
  const auto it = j.find("lambda");
  if (it == j.end() || (it->is_string() && it->get<std::string>() == "small")) {
    lambda = default_lambda(n, p, LambdaRegime::kSmall);
  } else if (it->is_string() && it->get<std::string>() == "large") {
    lambda = default_lambda(n, p, LambdaRegime::kLarge);
  } else if (it->is_number()) {
    lambda = it->get<double>();
  } else {
    throw ConfigError("coef_prior: lambda must be 'small', 'large' or a number");
  }
  CoefPriorConfig c = make(n, p, a4, lambda);
  if (j.contains("max_size")) {
    c.max_size = std::min<Eigen::Index>(p, j["max_size"].get<Eigen::Index>());
    c.validate();
  }
  return c;
}

nlohmann::json CoefPriorConfig::to_json() const {
  return {{"A4", a4}, {"lambda", lambda}, {"p", p}, {"n", n}, {"max_size", max_size}};
}

bool CoefPriorConfig::lambda_in_range() const {
  const double nn = static_cast<double>(n);
  const double pp = static_cast<double>(p);
  const double lo = std::sqrt(nn) / pp;
  const double hi = std::sqrt(nn * std::log(pp));
  return lambda >= lo * (1.0 - 1e-12) && lambda <= hi * (1.0 + 1e-12);
}

void CoefPriorConfig::validate() const {
  if (n < 1 || p < 1) throw ParameterError("coef_prior: n and p must be positive");
  if (!(a4 > 0.0)) throw ParameterError("coef_prior: A4 must be positive");
  if (!(lambda > 0.0)) throw ParameterError("coef_prior: lambda must be positive");
  if (max_size < 0 || max_size > p) throw ParameterError("coef_prior: invalid size cap");
}

double CoefPriorConfig::log_size_prior(Eigen::Index s) const {
  if (s < 0 || s > p) throw ParameterError("coef_prior: |S| out of range");
  if (s > max_size) return -std::numeric_limits<double>::infinity();
  // log sum_{k=0}^{cap} p^{-A4 k}, geometric series in a stable form.
  const double r = -a4 * std::log(static_cast<double>(p));
  double log_norm;
  if (r == 0.0) {
    log_norm = std::log(static_cast<double>(max_size + 1));
  } else {
    // (1 - q^{cap+1}) / (1 - q) with q = e^r < 1
    log_norm = std::log(-std::expm1(r * static_cast<double>(max_size + 1))) -
               std::log(-std::expm1(r));
  }
  return r * static_cast<double>(s) - log_norm;
}

double CoefPriorConfig::log_model_prior(Eigen::Index s) const {
  return log_size_prior(s) - log_binomial(p, s);
}

double CoefPriorConfig::log_slab(const Eigen::Ref<const Eigen::VectorXd> &values) const {
  return static_cast<double>(values.size()) * std::log(lambda / 2.0) -
         lambda * values.lpNorm<1>();
}

double log_prior(const SparseCoefficient &theta, const CoefPriorConfig &config) {
  if (static_cast<Eigen::Index>(theta.size()) > config.p)
    throw ParameterError("log_prior: |S| exceeds p");
  theta.validate(config.p);
  return config.log_model_prior(static_cast<Eigen::Index>(theta.size())) +
         config.log_slab(theta.values);
}

}  // namespace semibayes
