#include "semibayes/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "semibayes/errors.hpp"
#include "semibayes/quadrature.hpp"

namespace semibayes {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

Support nonzero_support(const Eigen::VectorXd &theta) {
  Support s;
  for (Eigen::Index j = 0; j < theta.size(); ++j)
    if (theta[j] != 0.0) s.push_back(static_cast<int>(j));
  return s;
}

bool contains_all(const Support &s, const Support &sub) {
  return std::includes(s.begin(), s.end(), sub.begin(), sub.end());
}

double normal_cdf(double x, double mean, double sd) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::numbers::sqrt2));
}

}  // namespace

Density as_density(const ErrorDensitySpec &spec) {
  if (spec.family() == ErrorFamily::kDegenerate)
    throw ParameterError("degenerate error law has no density");
  Density d;
  d.log_pdf = [spec](double y) { return spec.log_density(y); };
  d.score = [spec](double y) { return spec.score(y); };
  d.scale = std::sqrt(spec.variance());
  return d;
}

Density as_density(const SymmetrizedMixture &mix) {
  mix.validate();
  Density d;
  d.log_pdf = [mix](double y) { return log_eval(mix, y); };
  d.score = [mix](double y) { return score(mix, y); };
  double second = mix.sigma * mix.sigma;
  double reach = 0.0;
  for (Eigen::Index h = 0; h < mix.size(); ++h) {
    second += mix.weights[h] * mix.atoms[h] * mix.atoms[h];
    if (mix.weights[h] > 1e-10) reach = std::max(reach, std::abs(mix.atoms[h]));
  }
  d.scale = std::max(std::sqrt(second), (reach + 4.0 * mix.sigma) / 10.0);
  return d;
}

Density shifted(const Density &d, double shift) {
  Density out;
  out.log_pdf = [f = d.log_pdf, shift](double y) { return f(y - shift); };
  out.score = [f = d.score, shift](double y) { return f(y - shift); };
  out.center = d.center + shift;
  out.scale = d.scale;
  return out;
}

double hellinger(const Density &a, const Density &b) {
  const double scale = std::max(a.scale, b.scale);
  const double center = 0.5 * (a.center + b.center);
  const int half = 10 + static_cast<int>(std::ceil(std::abs(a.center - b.center) / (2.0 * scale)));
  auto f = [&](double y) {
    const double d = std::exp(0.5 * a.log_pdf(y)) - std::exp(0.5 * b.log_pdf(y));
    return d * d;
  };
  const double h2 = integrate_real_line(f, center, scale, 1e-9, half).value;
  return std::sqrt(std::clamp(h2, 0.0, 2.0));
}

double mean_hellinger(const Eigen::VectorXd &theta1, const Density &eta1,
                      const Eigen::VectorXd &theta2, const Density &eta2,
                      const Eigen::MatrixXd &x) {
  if (theta1.size() != x.cols() || theta2.size() != x.cols())
    throw ParameterError("mean_hellinger: dimension mismatch");
  const Eigen::VectorXd shift = x * (theta1 - theta2);
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double h = hellinger(shifted(eta1, shift[i]), eta2);
    total += h * h;
  }
  return std::sqrt(total / static_cast<double>(x.rows()));
}

double nu(const Density &eta, const Density &eta0) {
  auto f = [&](double y) {
    const double w = std::exp(eta0.log_pdf(y));
    return w == 0.0 ? 0.0 : eta.score(y) * eta0.score(y) * w;
  };
  return integrate_real_line(f, eta0.center, eta0.scale, 1e-9).value;
}

LocalQuadratic local_quadratic(const Dataset &data, const Eigen::VectorXd &theta0,
                               const Density &eta0, const Support &s) {
  if (theta0.size() != data.p()) throw ParameterError("local_quadratic: theta0 has wrong length");
  const Eigen::VectorXd eps = data.y - data.x.x() * theta0;
  Eigen::VectorXd sc(data.n());
  for (Eigen::Index i = 0; i < data.n(); ++i) sc[i] = eta0.score(eps[i]);
  LocalQuadratic out;
  out.g = data.x.columns(s).transpose() * sc / std::sqrt(static_cast<double>(data.n()));
  out.nu = nu(eta0, eta0);
  out.v = out.nu * data.x.gram_block(s);
  return out;
}

nlohmann::json LimitLaw::to_json() const {
  nlohmann::json cov = nlohmann::json::array();
  for (Eigen::Index a = 0; a < covariance.rows(); ++a) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index b = 0; b < covariance.cols(); ++b) row.push_back(covariance(a, b));
    cov.push_back(row);
  }
  return {{"support", support},
          {"center", std::vector<double>(center.data(), center.data() + center.size())},
          {"covariance", cov},
          {"n", n}};
}

LimitLaw limit_law(const Dataset &data, const Eigen::VectorXd &theta0, const Density &eta0) {
  LimitLaw law;
  law.support = nonzero_support(theta0);
  law.n = data.n();
  const auto k = static_cast<Eigen::Index>(law.support.size());
  if (k == 0) return law;
  const LocalQuadratic lq = local_quadratic(data, theta0, eta0, law.support);
  Eigen::LLT<Eigen::MatrixXd> llt(lq.v);
  if (llt.info() != Eigen::Success || !(lq.nu > 0.0))
    throw NumericError("limit_law: V is singular on the true support");
  const double n = static_cast<double>(data.n());
  Eigen::VectorXd theta_s(k);
  for (Eigen::Index a = 0; a < k; ++a) theta_s[a] = theta0[law.support[a]];
  law.center = theta_s - llt.solve(lq.g) / std::sqrt(n);
  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(k, k));
  law.covariance = 0.5 * (inv + inv.transpose()) / n;
  return law;
}

double lan_residual(const Dataset &data, const Eigen::VectorXd &theta, const Density &eta,
                    const Eigen::VectorXd &theta0, const Density &eta0) {
  if (theta.size() != data.p() || theta0.size() != data.p())
    throw ParameterError("lan_residual: coefficient length differs from p");
  const Eigen::VectorXd r = data.y - data.x.x() * theta;
  const Eigen::VectorXd r0 = data.y - data.x.x() * theta0;
  double diff = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i) diff += eta.log_pdf(r[i]) - eta.log_pdf(r0[i]);
  const Eigen::VectorXd d = theta - theta0;
  if ((d.array() == 0.0).all()) return diff;

  Support u;
  for (Eigen::Index j = 0; j < data.p(); ++j)
    if (theta[j] != 0.0 || theta0[j] != 0.0) u.push_back(static_cast<int>(j));
  const LocalQuadratic lq = local_quadratic(data, theta0, eta0, u);
  Eigen::VectorXd du(static_cast<Eigen::Index>(u.size()));
  for (std::size_t a = 0; a < u.size(); ++a) du[static_cast<Eigen::Index>(a)] = d[u[a]];
  const double n = static_cast<double>(data.n());
  return diff + std::sqrt(n) * du.dot(lq.g) + 0.5 * n * du.dot(lq.v * du);
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)> &cdf) {
  if (samples.empty()) throw ParameterError("ks_statistic: no samples");
  std::sort(samples.begin(), samples.end());
  const double m = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, f - static_cast<double>(i) / m, static_cast<double>(i + 1) / m - f});
  }
  return std::min(d, 1.0);
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ParameterError("quantile: no values");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

nlohmann::json BvmReport::to_json() const {
  return {{"mean_gap", number_or_null(mean_gap)},
          {"cov_gap", number_or_null(cov_gap)},
          {"proj_ks", number_or_null(proj_ks)},
          {"wrong_model_mass", wrong_model_mass},
          {"defined", defined},
          {"used_samples", used_samples}};
}

BvmReport bvm_report(const std::vector<ChainSample> &samples, const LimitLaw &law) {
  if (samples.size() < 500) throw ParameterError("bvm_report: need at least 500 stored draws");
  const auto k = static_cast<Eigen::Index>(law.support.size());
  BvmReport rep;
  std::vector<Eigen::VectorXd> draws;
  long wrong = 0;
  for (const auto &s : samples) {
    if (s.support != law.support) ++wrong;
    if (!contains_all(s.support, law.support)) continue;
    Eigen::VectorXd v(k);
    for (Eigen::Index a = 0; a < k; ++a) {
      const auto pos = std::lower_bound(s.support.begin(), s.support.end(), law.support[a]) -
                       s.support.begin();
      v[a] = s.values[pos];
    }
    draws.push_back(std::move(v));
  }
  rep.wrong_model_mass = static_cast<double>(wrong) / static_cast<double>(samples.size());
  rep.used_samples = static_cast<long>(draws.size());
  if (draws.size() < 2 || k == 0) {
    rep.defined = false;
    rep.mean_gap = rep.cov_gap = rep.proj_ks = kNaN;
    return rep;
  }
  const double m = static_cast<double>(draws.size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(k);
  for (const auto &v : draws) mean += v;
  mean /= m;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(k, k);
  for (const auto &v : draws) cov += (v - mean) * (v - mean).transpose();
  cov /= m - 1.0;

  const double n = static_cast<double>(law.n);
  rep.mean_gap = std::sqrt(n) * (mean - law.center).norm();
  const Eigen::MatrixXd target = n * law.covariance;
  rep.cov_gap = (n * cov - target).norm() / target.norm();
  rep.proj_ks = 0.0;
  for (Eigen::Index a = 0; a < k; ++a) {
    std::vector<double> col(draws.size());
    for (std::size_t t = 0; t < draws.size(); ++t) col[t] = draws[t][a];
    const double c = law.center[a];
    const double sd = std::sqrt(law.covariance(a, a));
    rep.proj_ks = std::max(rep.proj_ks,
                           ks_statistic(std::move(col), [&](double x) { return normal_cdf(x, c, sd); }));
  }
  return rep;
}

SelectionRow selection_row(const std::vector<ChainSample> &samples, const Support &s0) {
  if (samples.empty()) throw ParameterError("selection_row: empty chain");
  std::map<Support, long> counts;
  long exact = 0, super = 0;
  for (const auto &s : samples) {
    ++counts[s.support];
    if (s.support == s0) {
      ++exact;
    } else if (contains_all(s.support, s0)) {
      ++super;
    }
  }
  SelectionRow row;
  const double m = static_cast<double>(samples.size());
  row.p_true = static_cast<double>(exact) / m;
  row.p_superset = static_cast<double>(super) / m;
  long best = -1;
  for (const auto &[support, c] : counts) {
    if (c > best) {
      best = c;
      row.modal = support;
    }
  }
  row.modal_is_true = row.modal == s0;
  return row;
}

SelectionSummary selection_metrics(const std::vector<std::vector<ChainSample>> &chains,
                                   const Support &s0) {
  if (chains.empty()) throw ParameterError("selection_metrics: no replications");
  SelectionSummary out;
  for (const auto &c : chains) {
    out.rows.push_back(selection_row(c, s0));
    out.mean_p_true += out.rows.back().p_true;
    out.mean_p_superset += out.rows.back().p_superset;
    out.modal_true_fraction += out.rows.back().modal_is_true ? 1.0 : 0.0;
  }
  const double r = static_cast<double>(chains.size());
  out.mean_p_true /= r;
  out.mean_p_superset /= r;
  out.modal_true_fraction /= r;
  return out;
}

bool beta_min_satisfied(const Eigen::VectorXd &theta0, double threshold) {
  double smallest = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < theta0.size(); ++j)
    if (theta0[j] != 0.0) smallest = std::min(smallest, std::abs(theta0[j]));
  return smallest >= threshold;
}

nlohmann::json CoefErrors::to_json() const {
  return {{"l1_median", l1_median},     {"l1_q90", l1_q90},     {"l2_median", l2_median},
          {"l2_q90", l2_q90},           {"pred_median", pred_median}, {"pred_q90", pred_q90}};
}

CoefErrors coef_errors(const std::vector<ChainSample> &samples, const Eigen::VectorXd &theta0,
                       const Eigen::MatrixXd &x) {
  if (samples.empty()) throw ParameterError("coef_errors: empty chain");
  const Support s0 = nonzero_support(theta0);
  std::vector<double> l1, l2, pred;
  l1.reserve(samples.size());
  for (const auto &s : samples) {
    std::map<int, double> diff;
    for (int j : s0) diff[j] -= theta0[j];
    for (std::size_t a = 0; a < s.support.size(); ++a)
      diff[s.support[a]] += s.values[static_cast<Eigen::Index>(a)];
    double n1 = 0.0, n2 = 0.0;
    Eigen::VectorXd fit = Eigen::VectorXd::Zero(x.rows());
    for (const auto &[j, d] : diff) {
      n1 += std::abs(d);
      n2 += d * d;
      if (d != 0.0) fit += d * x.col(j);
    }
    l1.push_back(n1);
    l2.push_back(std::sqrt(n2));
    pred.push_back(fit.norm());
  }
  CoefErrors e;
  e.l1_median = quantile(l1, 0.5);
  e.l1_q90 = quantile(l1, 0.9);
  e.l2_median = quantile(l2, 0.5);
  e.l2_q90 = quantile(l2, 0.9);
  e.pred_median = quantile(pred, 0.5);
  e.pred_q90 = quantile(pred, 0.9);
  return e;
}

nlohmann::json DimensionSummary::to_json() const {
  return {{"median", median}, {"mean", mean}, {"q90", q90}, {"max", max}};
}

DimensionSummary dimension_summary(const std::vector<ChainSample> &samples) {
  if (samples.empty()) throw ParameterError("dimension_summary: empty chain");
  std::vector<double> sizes;
  sizes.reserve(samples.size());
  DimensionSummary out;
  for (const auto &s : samples) {
    sizes.push_back(static_cast<double>(s.support.size()));
    out.max = std::max(out.max, static_cast<int>(s.support.size()));
    out.mean += sizes.back();
  }
  out.mean /= static_cast<double>(sizes.size());
  out.median = quantile(sizes, 0.5);
  out.q90 = quantile(sizes, 0.9);
  return out;
}

std::pair<double, double> credible_interval(const std::vector<ChainSample> &samples, int j,
                                            double level) {
  std::vector<double> v;
  v.reserve(samples.size());
  for (const auto &s : samples) {
    const auto it = std::lower_bound(s.support.begin(), s.support.end(), j);
    v.push_back(it != s.support.end() && *it == j ? s.values[it - s.support.begin()] : 0.0);
  }
  const double tail = 0.5 * (1.0 - level);
  return {quantile(v, tail), quantile(v, 1.0 - tail)};
}

std::vector<double> density_hellinger(const std::vector<ChainSample> &samples,
                                      const Density &eta0) {
  std::vector<double> out;
  for (const auto &s : samples)
    if (s.mixture) out.push_back(hellinger(as_density(*s.mixture), eta0));
  return out;
}

}  // namespace semibayes
