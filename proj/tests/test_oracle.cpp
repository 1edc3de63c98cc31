#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "semibayes/oracle.hpp"

using namespace semibayes;

namespace {

constexpr double kPi = std::numbers::pi;

Dataset make_data(Eigen::Index n, const Eigen::VectorXd &theta, std::uint64_t seed) {
  DesignMatrix x = gen_design(n, theta.size(), {}, seed);
  Rng rng(seed + 7);
  Eigen::VectorXd y = x.x() * theta;
  for (Eigen::Index i = 0; i < n; ++i) y[i] += std_normal(rng);
  return Dataset{std::move(x), std::move(y)};
}

double log_phi_cdf(double z) { return std::log(0.5 * std::erfc(-z / std::sqrt(2.0))); }

Eigen::MatrixXd corr3(double r12, double r13, double r23) {
  Eigen::MatrixXd c(3, 3);
  c << 1, r12, r13, r12, 1, r23, r13, r23, 1;
  return c;
}

}  // namespace

TEST(Orthant, OneDimensional) {
  for (double m : {-30.0, -3.0, 0.0, 1.5}) {
    const Eigen::VectorXd mean = Eigen::VectorXd::Constant(1, m);
    const Eigen::MatrixXd cov = Eigen::MatrixXd::Constant(1, 1, 4.0);
    EXPECT_NEAR(log_orthant_probability(mean, cov), log_phi_cdf(m / 2.0), 1e-9 * std::max(1.0, std::abs(log_phi_cdf(m / 2.0))));
  }
}

TEST(Orthant, ZeroMeanArcsineFormulas) {
  for (double r : {-0.8, -0.3, 0.0, 0.5, 0.9}) {
    Eigen::MatrixXd c(2, 2);
    c << 1, r, r, 1;
    EXPECT_NEAR(std::exp(log_orthant_probability(Eigen::VectorXd::Zero(2), c)),
                0.25 + std::asin(r) / (2.0 * kPi), 1e-10)
        << r;
  }
  const Eigen::MatrixXd c = corr3(0.3, -0.2, 0.5);
  EXPECT_NEAR(std::exp(log_orthant_probability(Eigen::VectorXd::Zero(3), c)),
              0.125 + (std::asin(0.3) + std::asin(-0.2) + std::asin(0.5)) / (4.0 * kPi), 1e-9);
}

TEST(Orthant, IndependentProduct) {
  const Eigen::VectorXd mean = (Eigen::VectorXd(3) << -2.0, 0.5, -8.0).finished();
  const Eigen::VectorXd sd = (Eigen::VectorXd(3) << 1.0, 2.0, 0.5).finished();
  const Eigen::MatrixXd cov = sd.array().square().matrix().asDiagonal();
  double expect = 0.0;
  for (int k = 0; k < 3; ++k) expect += log_phi_cdf(mean[k] / sd[k]);
  EXPECT_NEAR(log_orthant_probability(mean, cov), expect, 1e-9 * std::abs(expect));
}

TEST(Orthant, TruncatedMeanOneDimensional) {
  const double m = -1.0, s = 2.0, a = m / s;
  const double ratio = std::exp(-0.5 * a * a) / std::sqrt(2.0 * kPi) / std::exp(log_phi_cdf(a));
  const TruncatedMoments t = positive_orthant_moments(Eigen::VectorXd::Constant(1, m),
                                                      Eigen::MatrixXd::Constant(1, 1, s * s));
  EXPECT_NEAR(t.mean[0], m + s * ratio, 1e-9);
  EXPECT_NEAR(t.cov(0, 0), s * s * (1.0 - a * ratio - ratio * ratio), 1e-8);
}

TEST(Oracle, PureNoiseFavoursEmptyModel) {
  const Dataset d = make_data(20, Eigen::VectorXd::Zero(2), 1);
  const CoefPriorConfig pr = CoefPriorConfig::make(20, 2, 2.0, LambdaRegime::kSmall);
  const OracleResult o = exact_posterior(d, pr, 1.0);
  const auto probs = o.model_probs();
  for (const auto &[s, q] : probs)
    if (!s.empty()) EXPECT_LT(q, probs.at({}));
}

TEST(Oracle, DominantCoordinate) {
  const Eigen::VectorXd theta = (Eigen::VectorXd(3) << 0.0, 3.0, 0.0).finished();
  const Dataset d = make_data(40, theta, 2);
  const OracleResult o = exact_posterior(d, CoefPriorConfig::make(40, 3, 2.0, LambdaRegime::kSmall), 1.0);
  double mass = 0.0;
  for (const auto &m : o.models)
    if (std::find(m.support.begin(), m.support.end(), 1) != m.support.end()) mass += m.prob;
  EXPECT_GT(mass, 0.99);
}

TEST(Oracle, SingleCoordinateEvidenceByGrid) {
  const Dataset d = make_data(15, Eigen::VectorXd::Constant(1, 0.4), 3);
  const CoefPriorConfig pr = CoefPriorConfig::make(15, 1, 2.0, 1.3);
  const double sigma = 0.8;
  const OracleResult o = exact_posterior(d, pr, sigma);
  const Eigen::VectorXd x = d.x.x().col(0);
  const double n = 15.0;
  auto log_f = [&](double t) {
    return -n * std::log(sigma) - 0.5 * n * std::log(2.0 * kPi) -
           (d.y - t * x).squaredNorm() / (2.0 * sigma * sigma) + std::log(pr.lambda / 2.0) -
           pr.lambda * std::abs(t);
  };
  const double top = log_f(x.dot(d.y) / x.squaredNorm());
  const int steps = 400000;
  const double lo = -10.0, hi = 10.0, h = (hi - lo) / steps;
  double sum = 0.0;
  for (int k = 0; k <= steps; ++k) sum += (k == 0 || k == steps ? 0.5 : 1.0) * std::exp(log_f(lo + k * h) - top);
  EXPECT_NEAR(o.find({0})->log_evidence, top + std::log(sum * h), 1e-7);
  EXPECT_NEAR(o.find({})->log_evidence, log_f(0.0) - std::log(pr.lambda / 2.0), 1e-9);
}

TEST(Oracle, NormalizedAndMethodsAgree) {
  const Eigen::VectorXd theta = (Eigen::VectorXd(3) << 0.8, -0.4, 0.0).finished();
  const Dataset d = make_data(30, theta, 4);
  const OracleResult o = exact_posterior(d, CoefPriorConfig::make(30, 3, 2.0, LambdaRegime::kSmall), 1.0);
  double total = 0.0;
  for (const auto &m : o.models) total += m.prob;
  EXPECT_NEAR(total, 1.0, 1e-10);
  EXPECT_EQ(o.models.size(), 8u);
  EXPECT_LE(o.method_gap(), 1e-8);
  EXPECT_TRUE(o.complete);
}

TEST(Oracle, PermutationEquivariant) {
  const Eigen::VectorXd theta = (Eigen::VectorXd(3) << 0.8, -0.4, 0.1).finished();
  const Dataset d = make_data(25, theta, 5);
  const std::vector<int> perm{2, 0, 1};  // new column k is old column perm[k]
  Eigen::MatrixXd xp(25, 3);
  for (int k = 0; k < 3; ++k) xp.col(k) = d.x.x().col(perm[k]);
  const Dataset dp{DesignMatrix(xp), d.y};
  const CoefPriorConfig pr = CoefPriorConfig::make(25, 3, 2.0, LambdaRegime::kSmall);
  const auto a = exact_posterior(d, pr, 1.0, false).model_probs();
  const auto b = exact_posterior(dp, pr, 1.0, false).model_probs();
  for (const auto &[s, q] : b) {
    Support old;
    for (int k : s) old.push_back(perm[k]);
    std::sort(old.begin(), old.end());
    EXPECT_NEAR(a.at(old), q, 1e-10);
  }
}

TEST(Oracle, LargeModelsSkipped) {
  const Dataset d = make_data(30, Eigen::VectorXd::Zero(5), 6);
  CoefPriorConfig pr = CoefPriorConfig::make(30, 5, 2.0, LambdaRegime::kSmall);
  pr.max_size = 5;
  const OracleResult o = exact_posterior(d, pr, 1.0, false);
  EXPECT_FALSE(o.complete);
  EXPECT_TRUE(o.find({0, 1, 2, 3})->skipped);
  EXPECT_TRUE(std::isnan(o.method_gap()));
}

TEST(Oracle, RejectsBadInput) {
  const Dataset d = make_data(30, Eigen::VectorXd::Zero(7), 7);
  EXPECT_THROW(exact_posterior(d, CoefPriorConfig::make(30, 7, 2.0, 1.0), 1.0), ParameterError);
  const Dataset e = make_data(30, Eigen::VectorXd::Zero(2), 7);
  EXPECT_THROW(exact_posterior(e, CoefPriorConfig::make(30, 2, 2.0, 1.0), 0.0), ParameterError);
  EXPECT_THROW(exact_posterior(e, CoefPriorConfig::make(30, 3, 2.0, 1.0), 1.0), ParameterError);
}

TEST(TvDistance, Examples) {
  const ModelDistribution a{{{}, 0.5}, {{0}, 0.5}};
  const ModelDistribution b{{{1}, 1.0}};
  EXPECT_DOUBLE_EQ(tv_distance(a, a), 0.0);
  EXPECT_DOUBLE_EQ(tv_distance(a, b), 1.0);
  EXPECT_DOUBLE_EQ(tv_distance(a, {{{}, 0.25}, {{0}, 0.75}}), 0.25);
}

TEST(TvDistance, IidDrawsFromOracle) {
  const Eigen::VectorXd theta = (Eigen::VectorXd(3) << 0.5, 0.25, 0.0).finished();
  const Dataset d = make_data(40, theta, 8);
  const OracleResult o = exact_posterior(d, CoefPriorConfig::make(40, 3, 2.0, LambdaRegime::kSmall), 1.0, false);
  Eigen::VectorXd logp(o.models.size());
  for (std::size_t k = 0; k < o.models.size(); ++k) logp[k] = std::log(o.models[k].prob);
  Rng rng(9);
  std::vector<ChainSample> draws(100000);
  for (auto &s : draws) s.support = o.models[categorical_from_log(rng, logp)].support;
  EXPECT_LE(tv_distance(o.model_probs(), model_frequencies(draws)), 0.01);
}
