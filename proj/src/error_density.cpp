#include "semibayes/error_density.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "semibayes/errors.hpp"
#include "semibayes/quadrature.hpp"

namespace semibayes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

// log cosh without overflow.
double log_cosh(double u) {
  const double a = std::abs(u);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

bool is_even_integer(double b) {
  return std::floor(b) == b && std::fmod(b, 2.0) == 0.0;
}

// Fills the density-ratio constants from the score bound via the mean value
// theorem on |x| <= 0.1 and returns the ratio prefactor.
double fill_ratio_bound(DensityMetadata &m, double c_score) {
  const double g = m.gamma1;
  const double two_g = std::pow(2.0, std::max(g - 1.0, 0.0));
  m.ratio_tau = std::max(g, 1.0);
  m.ratio_b = 0.1 * c_score * two_g;
  return std::exp(0.1 * c_score * (1.0 + two_g * std::pow(0.1, g)));
}

}  // namespace

ErrorDensitySpec ErrorDensitySpec::gaussian(double sigma) {
  if (!(sigma > 0.0)) throw ParameterError("gaussian: sigma must be positive");
  ErrorDensitySpec s;
  s.family_ = ErrorFamily::kGaussian;
  s.params_ = {sigma};
  s.weights_ = {1.0};
  s.locations_ = {0.0};
  auto &m = s.meta_;
  m.beta = kInf;
  m.tau = 2.0;
  m.tail_b = 1.0 / (4.0 * sigma * sigma);
  m.tail_a = 2.0 * sigma * std::sqrt(std::max(0.0, -(kLogSqrt2Pi + std::log(sigma))));
  m.gamma1 = 1.0;
  m.gamma2 = 0.0;
  m.gamma3 = 0.0;
  const double c = 1.0 / (sigma * sigma);
  m.c_eta0 = std::max(c, fill_ratio_bound(m, c));
  return s;
}

ErrorDensitySpec ErrorDensitySpec::symmetrized_two_point_normal(double z0,
                                                                double sigma) {
  if (!(sigma > 0.0)) throw ParameterError("two-point normal: sigma must be positive");
  ErrorDensitySpec s = finite_gaussian_mixture({1.0}, {z0}, sigma);
  s.family_ = ErrorFamily::kSymmetrizedTwoPointNormal;
  s.params_ = {z0, sigma};
  return s;
}

ErrorDensitySpec ErrorDensitySpec::finite_gaussian_mixture(std::vector<double> weights,
                                                           std::vector<double> locations,
                                                           double sigma) {
  if (weights.empty() || weights.size() != locations.size())
    throw ParameterError("mixture: weights and locations must have equal nonzero length");
  if (!(sigma > 0.0)) throw ParameterError("mixture: sigma must be positive");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ParameterError("mixture: negative weight");
    total += w;
  }
  if (!(total > 0.0)) throw ParameterError("mixture: weights sum to zero");
  for (double &w : weights) w /= total;

  ErrorDensitySpec s;
  s.family_ = ErrorFamily::kFiniteGaussianMixture;
  s.weights_ = weights;
  s.locations_ = locations;
  s.params_ = {sigma};
  double big = 0.0;
  for (double z : locations) big = std::max(big, std::abs(z));
  auto &m = s.meta_;
  const double s2 = sigma * sigma;
  const double mp = big / s2;
  m.beta = kInf;
  m.tau = 2.0;
  m.tail_b = 1.0 / (16.0 * s2);
  m.tail_a = std::max(2.0 * big,
                      4.0 * sigma * std::sqrt(std::max(0.0, -(kLogSqrt2Pi + std::log(sigma)))));
  m.gamma1 = 1.0;
  m.gamma2 = 0.0;
  m.gamma3 = 0.0;
  const double c = std::max({1.0 / s2, mp, 0.5 * std::max(1.0 / s2, mp * mp),
                             0.385 * mp * mp * mp});
  m.c_eta0 = std::max(c, fill_ratio_bound(m, c));
  return s;
}

ErrorDensitySpec ErrorDensitySpec::power_exponential(double a, double b, double delta) {
  if (!(a > 0.0) || !(b >= 2.0))
    throw ParameterError("power_exponential: need a > 0 and b >= 2");
  ErrorDensitySpec s;
  s.family_ = ErrorFamily::kPowerExponential;
  s.smoothed_ = !is_even_integer(b);
  s.params_ = {a, b, s.smoothed_ ? delta : 0.0};
  if (!s.smoothed_) {
    s.log_norm_ = std::log(2.0) + std::lgamma(1.0 + 1.0 / b) - std::log(a) / b;
  } else {
    const double scale = std::pow(a, -1.0 / b);
    auto f = [&](double y) { return std::exp(-a * std::pow(y * y + delta * delta, b / 2.0)); };
    s.log_norm_ = std::log(integrate_real_line(f, 0.0, scale, 1e-12).value);
  }
  auto &m = s.meta_;
  m.beta = kInf;
  m.tau = b;
  m.tail_b = a / 2.0;
  m.tail_a = std::pow(2.0 * std::max(0.0, -s.log_norm_) / a, 1.0 / b);
  m.gamma1 = b - 1.0;
  m.gamma2 = b - 2.0;
  m.gamma3 = std::max(b - 3.0, 0.0);
  double c = a * b * std::max(1.0, b - 1.0) * std::max(1.0, (b - 1.0) * (b - 2.0));
  if (s.smoothed_) c *= 4.0 * std::max(1.0, std::pow(delta, b - 3.0));
  m.c_eta0 = std::max(c, fill_ratio_bound(m, c));
  return s;
}

ErrorDensitySpec ErrorDensitySpec::degenerate() {
  ErrorDensitySpec s;
  s.family_ = ErrorFamily::kDegenerate;
  return s;
}

void ErrorDensitySpec::mixture_derivatives(double y, double *d1, double *d2,
                                           double *d3) const {
  // Derivatives of log sum_j c_j phi_s(y - mu_j) are cumulants of
  // a_j = -(y - mu_j)/s^2 under the responsibilities.
  const double s2 = params_.back() * params_.back();
  const std::size_t k = locations_.size();
  Eigen::ArrayXd logc(2 * k), a(2 * k);
  for (std::size_t j = 0; j < k; ++j) {
    const double lw = std::log(weights_[j] / 2.0);
    const double lm = y - locations_[j];
    const double lp = y + locations_[j];
    logc[2 * j] = lw - lm * lm / (2.0 * s2);
    logc[2 * j + 1] = lw - lp * lp / (2.0 * s2);
    a[2 * j] = -lm / s2;
    a[2 * j + 1] = -lp / s2;
  }
  Eigen::ArrayXd r = (logc - logc.maxCoeff()).exp();
  r /= r.sum();
  const double mean = (r * a).sum();
  const Eigen::ArrayXd c = a - mean;
  if (d1) *d1 = mean;
  if (d2) *d2 = -1.0 / s2 + (r * c.square()).sum();
  if (d3) *d3 = (r * c.cube()).sum();
}

double ErrorDensitySpec::log_density(double y) const {
  switch (family_) {
    case ErrorFamily::kGaussian: {
      const double s = params_[0];
      return -0.5 * y * y / (s * s) - std::log(s) - kLogSqrt2Pi;
    }
    case ErrorFamily::kSymmetrizedTwoPointNormal: {
      const double z = params_[0], s = params_[1];
      const double s2 = s * s;
      return -0.5 * (y * y + z * z) / s2 + log_cosh(z * y / s2) - std::log(s) -
             kLogSqrt2Pi;
    }
    case ErrorFamily::kPowerExponential: {
      const double a = params_[0], b = params_[1], d = params_[2];
      const double g = smoothed_ ? std::pow(y * y + d * d, b / 2.0) : std::pow(std::abs(y), b);
      return -a * g - log_norm_;
    }
    case ErrorFamily::kFiniteGaussianMixture: {
      const double s = params_[0];
      const double s2 = s * s;
      double best = -kInf;
      std::vector<double> pair_logs(locations_.size());
      for (std::size_t j = 0; j < locations_.size(); ++j) {
        const double l1 = -(y - locations_[j]) * (y - locations_[j]) / (2.0 * s2);
        const double l2 = -(y + locations_[j]) * (y + locations_[j]) / (2.0 * s2);
        const double hi = std::max(l1, l2);
        pair_logs[j] = std::log(weights_[j]) + hi +
                       std::log(0.5 * (std::exp(l1 - hi) + std::exp(l2 - hi)));
        best = std::max(best, pair_logs[j]);
      }
      double acc = 0.0;
      for (double l : pair_logs) acc += std::exp(l - best);
      return best + std::log(acc) - std::log(s) - kLogSqrt2Pi;
    }
    case ErrorFamily::kDegenerate:
      break;
  }
  throw ParameterError("degenerate error law has no density");
}

double ErrorDensitySpec::density(double y) const { return std::exp(log_density(y)); }

double ErrorDensitySpec::score(double y) const {
  switch (family_) {
    case ErrorFamily::kGaussian:
      return -y / (params_[0] * params_[0]);
    case ErrorFamily::kSymmetrizedTwoPointNormal: {
      const double z = params_[0], s2 = params_[1] * params_[1];
      return -y / s2 + z / s2 * std::tanh(z * y / s2);
    }
    case ErrorFamily::kPowerExponential: {
      const double a = params_[0], b = params_[1], d = params_[2];
      if (!smoothed_) return -a * b * std::pow(y, b - 1.0);  // b even: y^{b-1} is odd
      return -a * b * y * std::pow(y * y + d * d, b / 2.0 - 1.0);
    }
    case ErrorFamily::kFiniteGaussianMixture: {
      double d1;
      mixture_derivatives(y, &d1, nullptr, nullptr);
      return d1;
    }
    case ErrorFamily::kDegenerate:
      break;
  }
  throw ParameterError("degenerate error law has no score");
}

double ErrorDensitySpec::score2(double y) const {
  switch (family_) {
    case ErrorFamily::kGaussian:
      return -1.0 / (params_[0] * params_[0]);
    case ErrorFamily::kSymmetrizedTwoPointNormal: {
      const double z = params_[0], s2 = params_[1] * params_[1];
      const double k = z / s2;
      const double sech = 1.0 / std::cosh(k * y);
      return -1.0 / s2 + k * k * sech * sech;
    }
    case ErrorFamily::kPowerExponential: {
      const double a = params_[0], b = params_[1], d = params_[2];
      if (!smoothed_) return -a * b * (b - 1.0) * std::pow(y, b - 2.0);
      const double u = y * y + d * d;
      return -a * (b * std::pow(u, b / 2.0 - 1.0) +
                   b * (b - 2.0) * y * y * std::pow(u, b / 2.0 - 2.0));
    }
    case ErrorFamily::kFiniteGaussianMixture: {
      double d2;
      mixture_derivatives(y, nullptr, &d2, nullptr);
      return d2;
    }
    case ErrorFamily::kDegenerate:
      break;
  }
  throw ParameterError("degenerate error law has no score");
}

double ErrorDensitySpec::score3(double y) const {
  switch (family_) {
    case ErrorFamily::kGaussian:
      return 0.0;
    case ErrorFamily::kSymmetrizedTwoPointNormal: {
      const double z = params_[0], s2 = params_[1] * params_[1];
      const double k = z / s2;
      const double sech = 1.0 / std::cosh(k * y);
      return -2.0 * k * k * k * sech * sech * std::tanh(k * y);
    }
    case ErrorFamily::kPowerExponential: {
      const double a = params_[0], b = params_[1], d = params_[2];
      if (!smoothed_) {
        if (b == 2.0) return 0.0;
        return -a * b * (b - 1.0) * (b - 2.0) * std::pow(y, b - 3.0);
      }
      const double u = y * y + d * d;
      return -a * (3.0 * b * (b - 2.0) * y * std::pow(u, b / 2.0 - 2.0) +
                   b * (b - 2.0) * (b - 4.0) * y * y * y * std::pow(u, b / 2.0 - 3.0));
    }
    case ErrorFamily::kFiniteGaussianMixture: {
      double d3;
      mixture_derivatives(y, nullptr, nullptr, &d3);
      return d3;
    }
    case ErrorFamily::kDegenerate:
      break;
  }
  throw ParameterError("degenerate error law has no score");
}

double ErrorDensitySpec::variance() const {
  switch (family_) {
    case ErrorFamily::kGaussian:
      return params_[0] * params_[0];
    case ErrorFamily::kSymmetrizedTwoPointNormal:
    case ErrorFamily::kFiniteGaussianMixture: {
      double v = params_.back() * params_.back();
      for (std::size_t j = 0; j < weights_.size(); ++j)
        v += weights_[j] * locations_[j] * locations_[j];
      return v;
    }
    case ErrorFamily::kPowerExponential: {
      const double a = params_[0], b = params_[1];
      return std::exp(std::lgamma(3.0 / b) - std::lgamma(1.0 / b)) / std::pow(a, 2.0 / b);
    }
    case ErrorFamily::kDegenerate:
      return 0.0;
  }
  return 0.0;
}

Eigen::VectorXd ErrorDensitySpec::sample(Eigen::Index n, Rng &rng) const {
  if (n < 1) throw ParameterError("sample: n must be positive");
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    switch (family_) {
      case ErrorFamily::kGaussian:
        out[i] = params_[0] * std_normal(rng);
        break;
      case ErrorFamily::kSymmetrizedTwoPointNormal:
      case ErrorFamily::kFiniteGaussianMixture: {
        double u = uniform01(rng);
        std::size_t j = 0;
        while (j + 1 < weights_.size() && u > weights_[j]) u -= weights_[j++];
        const double sign = uniform01(rng) < 0.5 ? -1.0 : 1.0;
        out[i] = sign * locations_[j] + params_.back() * std_normal(rng);
        break;
      }
      case ErrorFamily::kPowerExponential: {
        const double a = params_[0], b = params_[1], d = params_[2];
        while (true) {
          const double g = gamma_shape_rate(rng, 1.0 / b, a);
          const double mag = std::pow(g, 1.0 / b);
          const double y = uniform01(rng) < 0.5 ? -mag : mag;
          if (!smoothed_) {
            out[i] = y;
            break;
          }
          const double excess = std::pow(y * y + d * d, b / 2.0) - std::pow(mag, b);
          if (uniform01(rng) <= std::exp(-a * excess)) {
            out[i] = y;
            break;
          }
        }
        break;
      }
      case ErrorFamily::kDegenerate:
        out[i] = 0.0;
        break;
    }
  }
  return out;
}

std::string ErrorDensitySpec::name() const {
  switch (family_) {
    case ErrorFamily::kGaussian: return "gaussian";
    case ErrorFamily::kSymmetrizedTwoPointNormal: return "symmetrized_two_point_normal";
    case ErrorFamily::kPowerExponential: return "power_exponential";
    case ErrorFamily::kFiniteGaussianMixture: return "finite_gaussian_mixture";
    case ErrorFamily::kDegenerate: return "degenerate";
  }
  return "unknown";
}

nlohmann::json ErrorDensitySpec::to_json() const {
  nlohmann::json j;
  j["family"] = name();
  nlohmann::json p = nlohmann::json::object();
  switch (family_) {
    case ErrorFamily::kGaussian:
      p["sigma"] = params_[0];
      break;
    case ErrorFamily::kSymmetrizedTwoPointNormal:
      p["z0"] = params_[0];
      p["sigma"] = params_[1];
      break;
    case ErrorFamily::kPowerExponential:
      p["a"] = params_[0];
      p["b"] = params_[1];
      if (smoothed_) p["delta"] = params_[2];
      break;
    case ErrorFamily::kFiniteGaussianMixture:
      p["weights"] = weights_;
      p["locations"] = locations_;
      p["sigma"] = params_[0];
      break;
    case ErrorFamily::kDegenerate:
      break;
  }
  j["params"] = p;
  if (family_ != ErrorFamily::kDegenerate) {
    j["beta"] = std::isinf(meta_.beta) ? nlohmann::json("inf") : nlohmann::json(meta_.beta);
    j["tau"] = meta_.tau;
    j["gammas"] = {meta_.gamma1, meta_.gamma2, meta_.gamma3};
    j["c_eta0"] = meta_.c_eta0;
  }
  return j;
}

ErrorDensitySpec ErrorDensitySpec::from_json(const nlohmann::json &j) {
  const std::string family = j.at("family").get<std::string>();
  const nlohmann::json p = j.value("params", nlohmann::json::object());
  ErrorDensitySpec s;
  if (family == "gaussian") {
    s = gaussian(p.value("sigma", 1.0));
  } else if (family == "symmetrized_two_point_normal") {
    s = symmetrized_two_point_normal(p.value("z0", 2.0), p.value("sigma", 1.0));
  } else if (family == "power_exponential") {
    s = power_exponential(p.value("a", 1.0), p.value("b", 2.0), p.value("delta", 1e-3));
  } else if (family == "finite_gaussian_mixture") {
    s = finite_gaussian_mixture(p.at("weights").get<std::vector<double>>(),
                                p.at("locations").get<std::vector<double>>(),
                                p.value("sigma", 1.0));
  } else if (family == "degenerate") {
    return degenerate();
  } else {
    throw ConfigError("unknown error family '" + family + "'");
  }
  if (j.contains("beta")) {
    const auto &b = j["beta"];
    s.meta_.beta = b.is_string() ? kInf : b.get<double>();
  }
  if (j.contains("tau")) s.meta_.tau = j["tau"].get<double>();
  if (j.contains("gammas")) {
    const auto g = j["gammas"].get<std::vector<double>>();
    if (g.size() != 3) throw ConfigError("gammas must have three entries");
    s.meta_.gamma1 = g[0];
    s.meta_.gamma2 = g[1];
    s.meta_.gamma3 = g[2];
  }
  if (j.contains("c_eta0")) s.meta_.c_eta0 = j["c_eta0"].get<double>();
  return s;
}

nlohmann::json ConditionReport::to_json() const {
  return {{"normalized", normalized},
          {"symmetric", symmetric},
          {"positive", positive},
          {"tail_bound", tail_bound},
          {"score_growth1", score_growth1},
          {"score_growth2", score_growth2},
          {"score_growth3", score_growth3},
          {"density_ratio", density_ratio},
          {"sub_gaussian_score", sub_gaussian_score},
          {"integral", integral},
          {"failures", failures}};
}

Eigen::VectorXd default_condition_grid() {
  return Eigen::VectorXd::LinSpaced(2001, -20.0, 20.0);
}

ConditionReport check_conditions(const ErrorDensitySpec &spec,
                                 const Eigen::VectorXd &grid) {
  ConditionReport r;
  if (spec.family() == ErrorFamily::kDegenerate) {
    r.failures.emplace_back("degenerate law has no density");
    return r;
  }
  const auto &m = spec.meta();
  const double scale = std::sqrt(spec.variance());
  r.integral = integrate_real_line([&](double y) { return spec.density(y); }, 0.0,
                                   std::max(scale, 0.05), 1e-10)
                   .value;
  r.normalized = std::abs(r.integral - 1.0) <= 1e-8;
  if (!r.normalized) r.failures.emplace_back("density does not integrate to one");

  r.symmetric = r.positive = r.tail_bound = true;
  r.score_growth1 = r.score_growth2 = r.score_growth3 = r.density_ratio = true;
  const double log_c = std::log(m.c_eta0);
  const double rel = 1e-9;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double y = grid[i];
    const double ay = std::abs(y);
    const double ld = spec.log_density(y);
    if (spec.log_density(-y) != ld) r.symmetric = false;
    if (!std::isfinite(ld)) r.positive = false;
    if (ay > m.tail_a && ld > -m.tail_b * std::pow(ay, m.tau) + rel) r.tail_bound = false;
    auto within = [&](double v, double gamma) {
      return std::abs(v) <= m.c_eta0 * (std::pow(ay, gamma) + 1.0) * (1.0 + rel);
    };
    if (!within(spec.score(y), m.gamma1)) r.score_growth1 = false;
    if (!within(spec.score2(y), m.gamma2)) r.score_growth2 = false;
    if (!within(spec.score3(y), m.gamma3)) r.score_growth3 = false;
    for (double x : {-0.1, -0.05, -0.01, 0.01, 0.05, 0.1}) {
      const double lr = spec.log_density(y + x) - ld;
      if (lr > log_c + m.ratio_b * std::pow(ay, m.ratio_tau) + rel) r.density_ratio = false;
    }
  }
  if (!r.symmetric) r.failures.emplace_back("density is not symmetric on the grid");
  if (!r.positive) r.failures.emplace_back("density vanishes on the grid");
  if (!r.tail_bound) r.failures.emplace_back("tail bound violated");
  if (!r.score_growth1) r.failures.emplace_back("first score growth bound violated");
  if (!r.score_growth2) r.failures.emplace_back("second score growth bound violated");
  if (!r.score_growth3) r.failures.emplace_back("third score growth bound violated");
  if (!r.density_ratio) r.failures.emplace_back("density ratio bound violated");
  r.sub_gaussian_score = m.tau >= 2.0 * m.gamma1;
  return r;
}

}  // namespace semibayes
