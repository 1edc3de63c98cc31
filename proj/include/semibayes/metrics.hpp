#ifndef SEMIBAYES_METRICS_HPP_
#define SEMIBAYES_METRICS_HPP_

#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "semibayes/data.hpp"
#include "semibayes/dpmix.hpp"
#include "semibayes/error_density.hpp"
#include "semibayes/sampler.hpp"

namespace semibayes {

/// A univariate density seen through its log-density and score, with a rough
/// location and spread used to place quadrature panels.
struct Density {
  std::function<double(double)> log_pdf;
  std::function<double(double)> score;
  double center = 0.0;
  double scale = 1.0;
};

Density as_density(const ErrorDensitySpec &spec);
Density as_density(const SymmetrizedMixture &mix);
/// eta(. - shift).
Density shifted(const Density &d, double shift);

/// Hellinger distance d_H with d_H^2 = int (sqrt f - sqrt g)^2; in [0, sqrt 2].
double hellinger(const Density &a, const Density &b);

/// d_n with d_n^2 = n^{-1} sum_i d_H^2(eta1(. - x_i theta1), eta2(. - x_i theta2)).
double mean_hellinger(const Eigen::VectorXd &theta1, const Density &eta1,
                      const Eigen::VectorXd &theta2, const Density &eta2,
                      const Eigen::MatrixXd &x);

/// int score_eta(y) score_eta0(y) eta0(y) dy.
double nu(const Density &eta, const Density &eta0);

struct LocalQuadratic {
  Eigen::VectorXd g;  // n^{-1/2} sum_i score_eta0(eps_i) x_{i,S}
  Eigen::MatrixXd v;  // nu_eta0 Sigma_S
  double nu = 0.0;
};

LocalQuadratic local_quadratic(const Dataset &data, const Eigen::VectorXd &theta0,
                               const Density &eta0, const Support &s);

struct LimitLaw {
  Support support;
  Eigen::VectorXd center;
  Eigen::MatrixXd covariance;
  Eigen::Index n = 0;

  nlohmann::json to_json() const;
};

/// Gaussian limit on the true support: center theta0_S - n^{-1/2} V^{-1} G and
/// covariance V^{-1} / n. Reduces to least squares for Gaussian errors.
LimitLaw limit_law(const Dataset &data, const Eigen::VectorXd &theta0, const Density &eta0);

/// r_n = L_n(theta, eta) - L_n(theta0, eta) + sqrt(n) d^T G_U + (n/2) nu d^T Sigma_U d
/// with d = theta - theta0 and U the union of both supports.
double lan_residual(const Dataset &data, const Eigen::VectorXd &theta, const Density &eta,
                    const Eigen::VectorXd &theta0, const Density &eta0);

/// sup_x |F_n(x) - F(x)|.
double ks_statistic(std::vector<double> samples, const std::function<double(double)> &cdf);

/// Linear-interpolation sample quantile, q in [0, 1].
double quantile(std::vector<double> values, double q);

struct BvmReport {
  double mean_gap = 0.0;
  double cov_gap = 0.0;
  double proj_ks = 0.0;
  double wrong_model_mass = 0.0;
  bool defined = true;  // false when no draw contains the true support
  long used_samples = 0;

  nlohmann::json to_json() const;
};

BvmReport bvm_report(const std::vector<ChainSample> &samples, const LimitLaw &law);
inline BvmReport bvm_report(const ChainOutput &chain, const LimitLaw &law) {
  return bvm_report(chain.samples, law);
}

struct SelectionRow {
  double p_true = 0.0;      // posterior mass of S = S0
  double p_superset = 0.0;  // posterior mass of S strictly containing S0
  bool modal_is_true = false;
  Support modal;
};

struct SelectionSummary {
  std::vector<SelectionRow> rows;
  double mean_p_true = 0.0;
  double mean_p_superset = 0.0;
  double modal_true_fraction = 0.0;
};

SelectionRow selection_row(const std::vector<ChainSample> &samples, const Support &s0);
SelectionSummary selection_metrics(const std::vector<std::vector<ChainSample>> &chains,
                                   const Support &s0);

/// Smallest nonzero |theta0_j| >= threshold.
bool beta_min_satisfied(const Eigen::VectorXd &theta0, double threshold);

struct CoefErrors {
  double l1_median = 0.0, l1_q90 = 0.0;
  double l2_median = 0.0, l2_q90 = 0.0;
  double pred_median = 0.0, pred_q90 = 0.0;

  nlohmann::json to_json() const;
};

CoefErrors coef_errors(const std::vector<ChainSample> &samples, const Eigen::VectorXd &theta0,
                       const Eigen::MatrixXd &x);

struct DimensionSummary {
  double median = 0.0;
  double mean = 0.0;
  double q90 = 0.0;
  int max = 0;

  nlohmann::json to_json() const;
};

DimensionSummary dimension_summary(const std::vector<ChainSample> &samples);

/// Equal-tailed marginal credible interval of theta_j (draws with j outside S count as 0).
std::pair<double, double> credible_interval(const std::vector<ChainSample> &samples, int j,
                                            double level);

/// d_H between each stored mixture snapshot and eta0.
std::vector<double> density_hellinger(const std::vector<ChainSample> &samples,
                                      const Density &eta0);

}  // namespace semibayes

#endif  // SEMIBAYES_METRICS_HPP_
