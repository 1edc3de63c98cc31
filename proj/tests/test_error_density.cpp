#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "semibayes/error_density.hpp"
#include "semibayes/quadrature.hpp"
#include "semibayes/rng.hpp"

using namespace semibayes;

namespace {

std::vector<ErrorDensitySpec> families() {
  return {ErrorDensitySpec::gaussian(1.0),
          ErrorDensitySpec::gaussian(2.5),
          ErrorDensitySpec::symmetrized_two_point_normal(2.0, 1.0),
          ErrorDensitySpec::power_exponential(1.0, 4.0),
          ErrorDensitySpec::power_exponential(0.5, 3.0),
          ErrorDensitySpec::finite_gaussian_mixture({0.3, 0.7}, {0.5, 2.0}, 0.8)};
}

double integral(const std::function<double(double)> &f, double scale) {
  return integrate_real_line(f, 0.0, scale).value;
}

}  // namespace

TEST(ErrorDensity, GaussianMode) {
  EXPECT_NEAR(ErrorDensitySpec::gaussian(1.0).density(0.0), 0.3989422804014327, 1e-15);
}

TEST(ErrorDensity, Symmetry) {
  for (const auto &f : families())
    for (double y : {0.1, 0.7, 1.3, 4.0, 9.5}) {
      EXPECT_EQ(f.density(y), f.density(-y)) << f.name();
      EXPECT_EQ(f.score(-y), -f.score(y)) << f.name();
    }
}

TEST(ErrorDensity, LogDensityConsistent) {
  for (const auto &f : families())
    for (double y : {-3.0, -0.2, 0.0, 0.9, 2.2}) {
      EXPECT_GT(f.density(y), 0.0);
      EXPECT_NEAR(f.log_density(y), std::log(f.density(y)), 1e-12);
    }
}

TEST(ErrorDensity, PowerExponentialTwoIsGaussian) {
  const auto pe = ErrorDensitySpec::power_exponential(1.0, 2.0);
  const auto g = ErrorDensitySpec::gaussian(1.0 / std::numbers::sqrt2);
  // Independent normalizer by quadrature of exp(-y^2).
  const double z = integral([](double y) { return std::exp(-y * y); }, 1.0);
  EXPECT_NEAR(z, std::sqrt(std::numbers::pi), 1e-10);
  for (double y : {0.0, 1.0, 2.0}) {
    EXPECT_NEAR(pe.density(y), std::exp(-y * y) / z, 1e-12);
    EXPECT_NEAR(pe.density(y), g.density(y), 1e-12);
  }
}

TEST(ErrorDensity, GaussianScores) {
  const auto g = ErrorDensitySpec::gaussian(1.0);
  for (double y : {-2.0, 0.0, 0.5, 3.0}) {
    EXPECT_DOUBLE_EQ(g.score(y), -y);
    EXPECT_DOUBLE_EQ(g.score2(y), -1.0);
    EXPECT_DOUBLE_EQ(g.score3(y), 0.0);
  }
}

TEST(ErrorDensity, ScoreVanishesAtZero) {
  for (const auto &f : families()) EXPECT_EQ(f.score(0.0), 0.0) << f.name();
}

TEST(ErrorDensity, TwoPointScoreFiniteDifference) {
  const auto f = ErrorDensitySpec::symmetrized_two_point_normal(2.0, 1.0);
  const double h = 1e-5, y = 0.7;
  const double fd = (f.log_density(y + h) - f.log_density(y - h)) / (2 * h);
  EXPECT_NEAR(f.score(y), fd, 1e-6 * std::abs(fd));
}

TEST(ErrorDensity, DerivativesMatchFiniteDifferences) {
  const double h = 1e-5;
  for (const auto &f : families()) {
    for (int k = 0; k < 200; ++k) {
      const double y = -6.0 + 12.0 * (k + 0.5) / 200.0;
      const double d1 = (f.log_density(y + h) - f.log_density(y - h)) / (2 * h);
      const double d2 = (f.score(y + h) - f.score(y - h)) / (2 * h);
      const double d3 = (f.score2(y + h) - f.score2(y - h)) / (2 * h);
      EXPECT_NEAR(f.score(y), d1, 1e-5 * std::max(1.0, std::abs(d1))) << f.name() << " y=" << y;
      EXPECT_NEAR(f.score2(y), d2, 1e-5 * std::max(1.0, std::abs(d2))) << f.name() << " y=" << y;
      EXPECT_NEAR(f.score3(y), d3, 1e-5 * std::max(1.0, std::abs(d3))) << f.name() << " y=" << y;
    }
  }
}

TEST(ErrorDensity, NormalizedAndMeanZeroScore) {
  for (const auto &f : families()) {
    const double scale = std::sqrt(f.variance());
    EXPECT_NEAR(integral([&](double y) { return f.density(y); }, scale), 1.0, 1e-8) << f.name();
    EXPECT_NEAR(integral([&](double y) { return f.score(y) * f.density(y); }, scale), 0.0, 1e-8)
        << f.name();
  }
}

TEST(ErrorDensity, SampleMoments) {
  Rng rng(42);
  const Eigen::VectorXd g = ErrorDensitySpec::gaussian(1.0).sample(100000, rng);
  const double mean = g.mean();
  const double var = (g.array() - mean).square().mean();
  EXPECT_NEAR(mean, 0.0, 0.02);
  EXPECT_NEAR(var, 1.0, 0.05);

  const Eigen::VectorXd t = ErrorDensitySpec::symmetrized_two_point_normal(2.0, 1.0).sample(100000, rng);
  const double tm = t.mean();
  const double sd = std::sqrt((t.array() - tm).square().mean());
  const double skew = ((t.array() - tm) / sd).cube().mean();
  EXPECT_NEAR(skew, 0.0, 0.05);
  EXPECT_NEAR(sd * sd, 5.0, 0.1);
}

TEST(ErrorDensity, SampleDeterminism) {
  for (const auto &f : families()) {
    Rng a(42), b(42);
    EXPECT_EQ(f.sample(50, a), f.sample(50, b)) << f.name();
  }
}

TEST(ErrorDensity, DegenerateSamplesZero) {
  Rng rng(1);
  EXPECT_TRUE(ErrorDensitySpec::degenerate().sample(10, rng).isZero());
}

TEST(Conditions, GaussianPassesEverything) {
  const auto r = check_conditions(ErrorDensitySpec::gaussian(1.0), default_condition_grid());
  EXPECT_TRUE(r.failures.empty());
  EXPECT_TRUE(r.normalized && r.symmetric && r.positive && r.tail_bound);
  EXPECT_TRUE(r.score_growth1 && r.score_growth2 && r.score_growth3 && r.density_ratio);
  EXPECT_TRUE(r.sub_gaussian_score);
  EXPECT_EQ(ErrorDensitySpec::gaussian(1.0).meta().tau, 2.0);
  EXPECT_EQ(ErrorDensitySpec::gaussian(1.0).meta().gamma1, 1.0);
}

TEST(Conditions, PowerExponentialFourViolatesSubGaussianScore) {
  const auto f = ErrorDensitySpec::power_exponential(1.0, 4.0);
  EXPECT_EQ(f.meta().tau, 4.0);
  EXPECT_EQ(f.meta().gamma1, 3.0);
  const auto r = check_conditions(f, default_condition_grid());
  EXPECT_FALSE(r.sub_gaussian_score);
  EXPECT_TRUE(r.tail_bound);
  EXPECT_TRUE(r.score_growth1);
}

TEST(Conditions, TwoPointIsSubGaussian) {
  const auto r = check_conditions(ErrorDensitySpec::symmetrized_two_point_normal(2.0, 1.0),
                                  default_condition_grid());
  EXPECT_TRUE(r.sub_gaussian_score);
  EXPECT_TRUE(r.failures.empty());
}

TEST(Conditions, GridCoversTwenty) {
  const Eigen::VectorXd g = default_condition_grid();
  EXPECT_LE(g.minCoeff(), -20.0);
  EXPECT_GE(g.maxCoeff(), 20.0);
}

TEST(ErrorDensity, JsonRoundTrip) {
  for (const auto &f : families()) {
    const auto g = ErrorDensitySpec::from_json(f.to_json());
    EXPECT_EQ(g.family(), f.family());
    for (double y : {0.0, 0.4, 3.3}) EXPECT_DOUBLE_EQ(g.density(y), f.density(y)) << f.name();
  }
  EXPECT_THROW(ErrorDensitySpec::from_json({{"family", "cauchy"}}), ConfigError);
}
