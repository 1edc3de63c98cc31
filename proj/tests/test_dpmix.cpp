#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "semibayes/dpmix.hpp"
#include "semibayes/quadrature.hpp"

using namespace semibayes;

namespace {

SymmetrizedMixture single(double z, double sigma) {
  SymmetrizedMixture m;
  m.weights = Eigen::VectorXd::Ones(1);
  m.atoms = Eigen::VectorXd::Constant(1, z);
  m.sigma = sigma;
  return m;
}

DpPriorConfig default_config() {
  DpPriorConfig c;
  c.alpha_mass = 1.0;
  c.base_scale = 1.0;
  c.truncation = 50;
  return c;
}

}  // namespace

TEST(StickBreaking, SingleComponent) {
  Rng rng(1);
  const Eigen::VectorXd w = stick_breaking(1.0, 1, rng);
  ASSERT_EQ(w.size(), 1);
  EXPECT_EQ(w[0], 1.0);
}

TEST(StickBreaking, ReproducibleSimplex) {
  Rng a(5), b(5);
  const Eigen::VectorXd w = stick_breaking(1.0, 50, a);
  EXPECT_EQ(w, stick_breaking(1.0, 50, b));
  EXPECT_NEAR(w.sum(), 1.0, 1e-15);
  EXPECT_TRUE((w.array() >= 0.0).all());
}

TEST(StickBreaking, FirstWeightMean) {
  Rng rng(9);
  double total = 0.0;
  const int draws = 10000;
  for (int k = 0; k < draws; ++k) total += stick_breaking(1.0, 50, rng)[0];
  EXPECT_NEAR(total / draws, 0.5, 0.02);
}

TEST(StickBreaking, TruncationStabilizes) {
  Rng rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd sticks(199);
    for (int h = 0; h < 199; ++h) sticks[h] = beta(rng, 1.0, 1.0);
    Eigen::VectorXd atoms(200);
    for (int h = 0; h < 200; ++h) atoms[h] = std_normal(rng);
    SymmetrizedMixture big{weights_from_sticks(sticks, 200), atoms, 0.8};
    SymmetrizedMixture small{weights_from_sticks(sticks.head(49), 50), atoms.head(50), 0.8};
    for (double y : {0.0, 0.6, 2.0}) EXPECT_NEAR(eval(big, y), eval(small, y), 1e-6);
  }
}

TEST(Mixture, DegenerateBaseIsStandardNormal) {
  DpPriorConfig c = default_config();
  c.base_scale = 0.0;
  c.fixed_sigma = 1.0;
  Rng rng(2);
  const SymmetrizedMixture m = sample_prior(c, 100, rng);
  EXPECT_NEAR(eval(m, 0.0), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(eval(m, 1.1), std::exp(-0.605) / std::sqrt(2.0 * std::numbers::pi), 1e-15);
}

TEST(Mixture, SymmetricAtMachinePrecision) {
  Rng rng(4);
  const DpPriorConfig c = default_config();
  for (int k = 0; k < 50; ++k) {
    const SymmetrizedMixture m = sample_prior(c, 100, rng);
    EXPECT_EQ(eval(m, 1.3), eval(m, -1.3));
    EXPECT_EQ(score(m, 0.8), -score(m, -0.8));
  }
}

TEST(Mixture, SigmaPriorMean) {
  DpPriorConfig c = default_config();
  c.m0 = 2;
  c.a0 = 3.0;
  c.b0 = 2.0;
  Rng rng(6);
  double total = 0.0;
  const int draws = 10000;
  for (int k = 0; k < draws; ++k) {
    const double s = sample_sigma_prior(c, 100, rng);
    total += s * s;
  }
  EXPECT_NEAR(total / draws, 1.0, 0.05);
}

TEST(Mixture, SigmaPriorDensityNormalized) {
  for (int m0 : {2, 6}) {
    DpPriorConfig c = default_config();
    c.m0 = m0;
    const auto f = [&](double t) { return std::exp(log_sigma_prior(c, std::exp(t)) + t); };
    EXPECT_NEAR(integrate_real_line(f, 0.0, 0.5).value, 1.0, 1e-8) << "m0 " << m0;
  }
}

TEST(Mixture, SingleAtomValues) {
  const SymmetrizedMixture zero = single(0.0, 1.0);
  for (double y : {-2.0, 0.0, 0.3}) {
    EXPECT_NEAR(eval(zero, y), std::exp(-0.5 * y * y) / std::sqrt(2.0 * std::numbers::pi), 1e-16);
  }
  EXPECT_NEAR(eval(single(2.0, 1.0), 0.0), 0.0539909665131881, 1e-15);
}

TEST(Mixture, IntegratesToOne) {
  Rng rng(8);
  const DpPriorConfig c = default_config();
  for (int k = 0; k < 5; ++k) {
    const SymmetrizedMixture m = sample_prior(c, 100, rng);
    const double reach = m.atoms.cwiseAbs().maxCoeff() + 4.0 * m.sigma;
    const auto r = integrate_real_line([&](double y) { return eval(m, y); }, 0.0, reach / 10.0);
    EXPECT_NEAR(r.value, 1.0, 1e-8);
  }
}

TEST(Mixture, LogLikContinuity) {
  Rng rng(10);
  const SymmetrizedMixture m = sample_prior(default_config(), 100, rng);
  Eigen::VectorXd r(20);
  for (int i = 0; i < 20; ++i) r[i] = 2.0 * std_normal(rng);
  const double base = log_lik(m, r);
  EXPECT_NEAR(log_eval(m, 0.7) + log_eval(m, -1.2), log_lik(m, (Eigen::VectorXd(2) << 0.7, -1.2).finished()), 1e-12);
  for (double h : {1e-4, 1e-6, 1e-8}) {
    SymmetrizedMixture s = m;
    s.sigma += h;
    EXPECT_LT(std::abs(log_lik(s, r) - base), 1e4 * h);
    SymmetrizedMixture a = m;
    a.atoms[0] += h;
    EXPECT_LT(std::abs(log_lik(a, r) - base), 1e4 * h);
  }
}

TEST(Mixture, ScoreMatchesFiniteDifference) {
  Rng rng(12);
  const SymmetrizedMixture m = sample_prior(default_config(), 100, rng);
  const double h = 1e-5;
  for (double y : {-2.5, -0.3, 0.4, 1.7}) {
    const double fd = (log_eval(m, y + h) - log_eval(m, y - h)) / (2 * h);
    EXPECT_NEAR(score(m, y), fd, 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

TEST(DpConfig, TruncationHalfWidths) {
  DpPriorConfig c = default_config();
  c.c_prime = 1.0;
  EXPECT_DOUBLE_EQ(c.half_width(100), 100.0);
  EXPECT_TRUE(std::isinf(c.sigma2_upper(100)));
  c.trunc_mode = TruncationMode::kBvm;
  c.tau = 2.0;
  EXPECT_NEAR(c.half_width(100), std::log(100.0), 1e-12);
  EXPECT_NEAR(c.sigma2_upper(100), std::log(100.0), 1e-12);
}

TEST(DpConfig, Validation) {
  DpPriorConfig c = default_config();
  c.m0 = 3;
  EXPECT_THROW(c.validate(), ConfigError);
  c = default_config();
  c.alpha_mass = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = default_config();
  c.truncation = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  const DpPriorConfig d = DpPriorConfig::from_json(default_config().to_json());
  EXPECT_EQ(d.to_json(), default_config().to_json());
}

TEST(DpConfig, TruncationRule) {
  EXPECT_EQ(truncation_rule(1.0, 3.0, 800.0, 400.0, 50), 50);
  EXPECT_EQ(truncation_rule(40.0, 3.0, 800.0, 400.0, 50),
            static_cast<int>(std::ceil(40.0 * 3.0 * std::log(800.0) / std::log(400.0))));
}

TEST(DpConfig, DegenerateTruncationRejected) {
  DpPriorConfig c = default_config();
  c.trunc_mode = TruncationMode::kBvm;
  c.c_prime = 1e-9;
  c.a0 = 3.0;
  c.b0 = 2.0;
  Rng rng(1);
  EXPECT_THROW(sample_sigma_prior(c, 100, rng), ConfigError);
}
