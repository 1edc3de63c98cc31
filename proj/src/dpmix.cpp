#include "semibayes/dpmix.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "semibayes/errors.hpp"

namespace semibayes {

namespace {
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);
constexpr int kMaxRejections = 100000;
}  // namespace

double DpPriorConfig::half_width(Eigen::Index n) const {
  const double nn = static_cast<double>(n);
  if (trunc_mode == TruncationMode::kLinear) return c_prime * nn;
  return c_prime * std::pow(std::log(nn), 2.0 / tau);
}

double DpPriorConfig::sigma2_upper(Eigen::Index n) const {
  if (trunc_mode == TruncationMode::kLinear) return std::numeric_limits<double>::infinity();
  return c_prime * std::log(static_cast<double>(n));
}

void DpPriorConfig::validate() const {
  if (!(alpha_mass > 0.0)) throw ConfigError("dpmix: alpha_mass must be positive");
  if (!(base_scale >= 0.0)) throw ConfigError("dpmix: base_scale must be nonnegative");
  if (!(c_prime > 0.0)) throw ConfigError("dpmix: Cprime must be positive");
  if (!(tau > 0.0)) throw ConfigError("dpmix: tau must be positive");
  if (m0 != 2 && m0 != 6) throw ConfigError("dpmix: m0 must be 2 or 6");
  if (!(a0 > 0.0) || !(b0 > 0.0)) throw ConfigError("dpmix: a0 and b0 must be positive");
  if (truncation < 1) throw ConfigError("dpmix: H must be at least 1");
  if (fixed_sigma && !(*fixed_sigma > 0.0)) throw ConfigError("dpmix: fixed sigma must be positive");
}

nlohmann::json DpPriorConfig::to_json() const {
  nlohmann::json j{{"alpha_mass", alpha_mass},
                   {"base_scale", base_scale},
                   {"trunc_mode", trunc_mode == TruncationMode::kLinear ? "linear" : "bvm"},
                   {"Cprime", c_prime},
                   {"tau", tau},
                   {"m0", m0},
                   {"a0", a0},
                   {"b0", b0},
                   {"H", truncation}};
  if (fixed_sigma) j["fixed_sigma"] = *fixed_sigma;
  return j;
}

DpPriorConfig DpPriorConfig::from_json(const nlohmann::json &j) {
  DpPriorConfig c;
  c.alpha_mass = j.value("alpha_mass", c.alpha_mass);
  c.base_scale = j.value("base_scale", c.base_scale);
  const std::string mode = j.value("trunc_mode", std::string("linear"));
  if (mode == "linear") {
    c.trunc_mode = TruncationMode::kLinear;
  } else if (mode == "bvm") {
    c.trunc_mode = TruncationMode::kBvm;
  } else {
    throw ConfigError("dpmix: trunc_mode must be 'linear' or 'bvm'");
  }
  c.c_prime = j.value("Cprime", c.c_prime);
  c.tau = j.value("tau", c.tau);
  c.m0 = j.value("m0", c.m0);
  c.a0 = j.value("a0", c.a0);
  c.b0 = j.value("b0", c.b0);
  c.truncation = j.value("H", c.truncation);
  if (j.contains("fixed_sigma")) c.fixed_sigma = j["fixed_sigma"].get<double>();
  c.validate();
  return c;
}

int truncation_rule(double c2, double s, double p, double n, int floor_h) {
  const double h = std::ceil(c2 * s * std::log(p) / std::log(n));
  return std::max(floor_h, static_cast<int>(h));
}

void SymmetrizedMixture::validate() const {
  if (weights.size() < 1 || weights.size() != atoms.size())
    throw ParameterError("mixture: weights and atoms must have equal nonzero length");
  if ((weights.array() < 0.0).any()) throw ParameterError("mixture: negative weight");
  if (std::abs(weights.sum() - 1.0) > 1e-12) throw ParameterError("mixture: weights must sum to one");
  if (!(sigma > 0.0)) throw ParameterError("mixture: sigma must be positive");
}

Eigen::VectorXd weights_from_sticks(const Eigen::VectorXd &sticks, int truncation) {
  Eigen::VectorXd w(truncation);
  double remaining = 1.0;
  double used = 0.0;
  for (int h = 0; h + 1 < truncation; ++h) {
    w[h] = remaining * sticks[h];
    used += w[h];
    remaining *= 1.0 - sticks[h];
  }
  w[truncation - 1] = std::max(0.0, 1.0 - used);
  return w;
}

Eigen::VectorXd stick_breaking(double alpha_mass, int truncation, Rng &rng) {
  if (truncation < 1) throw ParameterError("stick_breaking: H must be at least 1");
  Eigen::VectorXd v(std::max(truncation - 1, 0));
  for (int h = 0; h + 1 < truncation; ++h) v[h] = beta(rng, 1.0, alpha_mass);
  return weights_from_sticks(v, truncation);
}

double sample_sigma_prior(const DpPriorConfig &config, Eigen::Index n, Rng &rng) {
  if (config.fixed_sigma) return *config.fixed_sigma;
  const double upper = config.sigma2_upper(n);
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    const double x = inverse_gamma(rng, config.a0, config.b0);
    const double sigma = std::pow(x, 1.0 / config.m0);
    if (sigma * sigma <= upper && sigma > 0.0) return sigma;
  }
  throw ConfigError("sigma prior truncation rejects every draw; support is degenerate");
}

double log_sigma_prior(const DpPriorConfig &config, double sigma) {
  const double m = config.m0;
  const double logx = m * std::log(sigma);
  return config.a0 * std::log(config.b0) - std::lgamma(config.a0) -
         (config.a0 + 1.0) * logx - config.b0 * std::exp(-logx) + std::log(m) +
         (m - 1.0) * std::log(sigma);
}

double sample_base_atom(const DpPriorConfig &config, Eigen::Index n, Rng &rng) {
  if (config.base_scale == 0.0) return 0.0;
  const double w = config.half_width(n);
  return truncated_normal(rng, 0.0, config.base_scale, -w, w);
}

SymmetrizedMixture sample_prior(const DpPriorConfig &config, Eigen::Index n, Rng &rng) {
  config.validate();
  SymmetrizedMixture mix;
  mix.weights = stick_breaking(config.alpha_mass, config.truncation, rng);
  mix.atoms.resize(config.truncation);
  for (int h = 0; h < config.truncation; ++h) mix.atoms[h] = sample_base_atom(config, n, rng);
  mix.sigma = sample_sigma_prior(config, n, rng);
  return mix;
}

double log_eval(const SymmetrizedMixture &mix, double y) {
  const double s2 = mix.sigma * mix.sigma;
  double best = -std::numeric_limits<double>::infinity();
  const Eigen::Index k = mix.size();
  Eigen::ArrayXd terms(k);
  for (Eigen::Index h = 0; h < k; ++h) {
    if (mix.weights[h] <= 0.0) {
      terms[h] = -std::numeric_limits<double>::infinity();
      continue;
    }
    const double z = mix.atoms[h];
    const double l1 = -(y - z) * (y - z) / (2.0 * s2);
    const double l2 = -(y + z) * (y + z) / (2.0 * s2);
    const double hi = std::max(l1, l2);
    terms[h] = std::log(mix.weights[h]) + hi +
               std::log(0.5 * (std::exp(l1 - hi) + std::exp(l2 - hi)));
    best = std::max(best, terms[h]);
  }
  const double acc = (terms - best).exp().sum();
  return best + std::log(acc) - std::log(mix.sigma) - kLogSqrt2Pi;
}

double eval(const SymmetrizedMixture &mix, double y) { return std::exp(log_eval(mix, y)); }

double score(const SymmetrizedMixture &mix, double y) {
  const double s2 = mix.sigma * mix.sigma;
  const Eigen::Index k = mix.size();
  Eigen::ArrayXd logc(2 * k), a(2 * k);
  for (Eigen::Index h = 0; h < k; ++h) {
    const double lw = mix.weights[h] > 0.0 ? std::log(mix.weights[h] / 2.0)
                                           : -std::numeric_limits<double>::infinity();
    const double z = mix.atoms[h];
    logc[2 * h] = lw - (y - z) * (y - z) / (2.0 * s2);
    logc[2 * h + 1] = lw - (y + z) * (y + z) / (2.0 * s2);
    a[2 * h] = -(y - z) / s2;
    a[2 * h + 1] = -(y + z) / s2;
  }
  const Eigen::ArrayXd r = (logc - logc.maxCoeff()).exp();
  return (r * a).sum() / r.sum();
}

double log_lik(const SymmetrizedMixture &mix,
               const Eigen::Ref<const Eigen::VectorXd> &residuals) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < residuals.size(); ++i) total += log_eval(mix, residuals[i]);
  return total;
}

}  // namespace semibayes
