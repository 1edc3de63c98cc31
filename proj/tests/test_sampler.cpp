#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "semibayes/geweke.hpp"
#include "semibayes/oracle.hpp"
#include "semibayes/sampler.hpp"

using namespace semibayes;

namespace {

Dataset make_data(Eigen::Index n, const Eigen::VectorXd &theta, double noise, std::uint64_t seed) {
  DesignMatrix x = gen_design(n, theta.size(), {}, seed);
  Rng rng(seed + 1);
  Eigen::VectorXd y = x.x() * theta;
  for (Eigen::Index i = 0; i < n; ++i) y[i] += noise * std_normal(rng);
  return Dataset{std::move(x), std::move(y)};
}

ModelPriors dp_priors(Eigen::Index n, Eigen::Index p, int h = 10) {
  ModelPriors pr{CoefPriorConfig::make(n, p, 2.0, LambdaRegime::kSmall), DpPriorConfig{}};
  pr.dp.truncation = h;
  return pr;
}

ModelPriors fixed_priors(Eigen::Index n, Eigen::Index p) {
  ModelPriors pr{CoefPriorConfig::make(n, p, 2.0, LambdaRegime::kSmall), DpPriorConfig{}};
  pr.dp.fixed_sigma = 1.0;
  return pr;
}

SamplerConfig fixed_config(int sweeps, int burn_in) {
  SamplerConfig c;
  c.sweeps = sweeps;
  c.burn_in = burn_in;
  c.mode = SamplerMode::kFixedGaussian;
  return c;
}

// One-component state with the given atom and sigma.
ChainState single_atom_state(Eigen::Index n, double atom, double sigma, std::uint64_t seed) {
  ChainState s;
  s.rng = Rng(seed);
  s.values.resize(0);
  s.lasso_scales.resize(0);
  s.alloc = Eigen::VectorXi::Zero(n);
  s.sign = Eigen::VectorXi::Ones(n);
  s.sticks.resize(0);
  s.mix.weights = Eigen::VectorXd::Ones(1);
  s.mix.atoms = Eigen::VectorXd::Constant(1, atom);
  s.mix.sigma = sigma;
  return s;
}

double excess_kurtosis(const std::vector<double> &v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double m2 = 0.0, m4 = 0.0;
  for (double x : v) {
    const double d = (x - m) * (x - m);
    m2 += d;
    m4 += d * d;
  }
  m2 /= static_cast<double>(v.size());
  m4 /= static_cast<double>(v.size());
  return m4 / (m2 * m2) - 3.0;
}

}  // namespace

TEST(Init, ZeroResponse) {
  const Dataset d{gen_design(20, 4, {}, 1), Eigen::VectorXd::Zero(20)};
  SamplerConfig c;
  const ChainState s = init(d, dp_priors(20, 4), c, 3);
  ASSERT_EQ(s.values.size(), 1);
  EXPECT_EQ(s.values[0], 0.0);
  EXPECT_TRUE(residuals(s, d).isZero());
  EXPECT_DOUBLE_EQ(s.mix.sigma, 1e-3);
}

TEST(Init, Deterministic) {
  const Dataset d = make_data(50, Eigen::VectorXd::LinSpaced(6, 0.0, 1.0), 1.0, 4);
  SamplerConfig c;
  const ChainState a = init(d, dp_priors(50, 6), c, 9), b = init(d, dp_priors(50, 6), c, 9);
  EXPECT_EQ(a.support, b.support);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.lasso_scales, b.lasso_scales);
  EXPECT_EQ(a.sign, b.sign);
  EXPECT_EQ(a.mix.atoms, b.mix.atoms);
  EXPECT_EQ(a.mix.weights, b.mix.weights);
  EXPECT_EQ(a.mix.sigma, b.mix.sigma);
}

TEST(Init, StartsAtLargestCorrelation) {
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(10);
  theta[6] = 3.0;
  const Dataset d = make_data(100, theta, 1.0, 5);
  int best = -1;
  double top = -1.0;
  for (int j = 0; j < 10; ++j) {
    const Eigen::VectorXd xc = d.x.x().col(j).array() - d.x.x().col(j).mean();
    const Eigen::VectorXd yc = d.y.array() - d.y.mean();
    const double c = std::abs(xc.dot(yc)) / (xc.norm() * yc.norm());
    if (c > top) {
      top = c;
      best = j;
    }
  }
  SamplerConfig c;
  const ChainState s = init(d, dp_priors(100, 10), c, 1);
  EXPECT_EQ(s.support, Support{best});
  EXPECT_EQ(best, 6);
  const Eigen::VectorXd col = d.x.x().col(6);
  EXPECT_NEAR(s.values[0], col.dot(d.y) / col.squaredNorm(), 1e-12);
  EXPECT_THROW(init(Dataset{gen_design(1, 2, {}, 1), Eigen::VectorXd::Zero(1)}, dp_priors(1, 2), c, 1),
               ParameterError);
}

TEST(SignsAllocs, ZeroAtomGivesFairSigns) {
  const Dataset d{gen_design(1, 1, {}, 1), Eigen::VectorXd::Constant(1, 0.4)};
  ChainState s = single_atom_state(1, 0.0, 1.0, 2);
  int plus = 0;
  const int draws = 20000;
  for (int k = 0; k < draws; ++k) {
    update_signs_allocs(s, d);
    plus += s.sign[0] == 1;
    EXPECT_EQ(s.alloc[0], 0);
  }
  EXPECT_NEAR(static_cast<double>(plus) / draws, 0.5, 0.015);
}

TEST(SignsAllocs, SeparatedAtomPicksPositiveSign) {
  const Dataset d{gen_design(1, 1, {}, 1), Eigen::VectorXd::Constant(1, 2.9)};
  ChainState s = single_atom_state(1, 3.0, 0.1, 3);
  // P(t = -1) = 1 / (1 + exp(2 * 2.9 * 3 / 0.01)), far below 1e-3.
  for (int k = 0; k < 10000; ++k) {
    update_signs_allocs(s, d);
    ASSERT_EQ(s.sign[0], 1);
  }
}

TEST(SignsAllocs, AllocationFrequencies) {
  // Two atoms, residual 1.0: categorical over (h, t) against direct arithmetic.
  const Dataset d{gen_design(1, 1, {}, 1), Eigen::VectorXd::Constant(1, 1.0)};
  ChainState s = single_atom_state(1, 0.0, 1.0, 4);
  s.mix.weights = (Eigen::VectorXd(2) << 0.3, 0.7).finished();
  s.mix.atoms = (Eigen::VectorXd(2) << 0.5, 2.0).finished();
  s.sticks = Eigen::VectorXd::Constant(1, 0.3);
  Eigen::Vector4d expect;
  expect << 0.3 * std::exp(-0.125), 0.7 * std::exp(-0.5), 0.3 * std::exp(-1.125),
      0.7 * std::exp(-4.5);
  expect /= expect.sum();
  Eigen::Vector4d count = Eigen::Vector4d::Zero();
  const int draws = 100000;
  for (int k = 0; k < draws; ++k) {
    update_signs_allocs(s, d);
    count[s.alloc[0] + (s.sign[0] == 1 ? 0 : 2)] += 1.0;
  }
  count /= draws;
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(count[k], expect[k], 0.006) << k;
}

TEST(Atoms, EmptyComponentDrawsFromBase) {
  const Eigen::Index n = 10;
  const Dataset d{gen_design(n, 1, {}, 1), Eigen::VectorXd::Zero(n)};
  ModelPriors pr = dp_priors(n, 1, 2);
  pr.dp.base_scale = 1.5;
  ChainState s = single_atom_state(n, 0.0, 1.0, 5);
  s.mix.weights = (Eigen::VectorXd(2) << 1.0, 0.0).finished();
  s.mix.atoms = Eigen::VectorXd::Zero(2);
  double sum = 0.0, sq = 0.0;
  const int draws = 20000;
  for (int k = 0; k < draws; ++k) {
    update_atoms(s, d, pr);
    sum += s.mix.atoms[1];
    sq += s.mix.atoms[1] * s.mix.atoms[1];
  }
  EXPECT_NEAR(sum / draws, 0.0, 0.05);
  EXPECT_NEAR(sq / draws, 2.25, 0.1);
}

TEST(Atoms, FlatBaseGivesSampleMean) {
  const Eigen::Index n = 8;
  Eigen::VectorXd y(n);
  y << 1.0, -2.0, 0.5, 3.0, 1.5, -0.5, 2.0, 0.25;
  const Dataset d{gen_design(n, 1, {}, 1), y};
  ModelPriors pr = dp_priors(n, 1, 1);
  pr.dp.base_scale = 1e8;
  pr.dp.c_prime = 1e9;
  ChainState s = single_atom_state(n, 0.0, 1e-6, 6);
  s.sign << 1, -1, 1, 1, 1, -1, 1, 1;
  double target = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) target += s.sign[i] * y[i];
  target /= n;
  update_atoms(s, d, pr);
  EXPECT_NEAR(s.mix.atoms[0], target, 1e-5);
}

TEST(Sigma, ConjugateUpdateMatchesData) {
  const Eigen::Index n = 100;
  Rng rng(7);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = std_normal(rng);
  y *= 20.0 / y.norm();  // residual sum of squares exactly 4 n
  const Dataset d{gen_design(n, 1, {}, 1), y};
  ModelPriors pr = dp_priors(n, 1, 1);
  pr.dp.m0 = 2;
  ChainState s = single_atom_state(n, 0.0, 1.0, 8);
  SamplerConfig c;
  double total = 0.0;
  for (int k = 0; k < 500; ++k) {
    update_sigma(s, d, pr, c);
    total += s.mix.sigma * s.mix.sigma;
  }
  EXPECT_GE(total / 500, 3.2);
  EXPECT_LE(total / 500, 4.8);
  // Closed form: IG(a0 + n/2, b0 + ssr/2) mean.
  const double closed = (pr.dp.b0 + 0.5 * y.squaredNorm()) / (pr.dp.a0 + 0.5 * n - 1.0);
  EXPECT_NEAR(total / 500, closed, 0.1 * closed);
}

TEST(Sigma, MetropolisStaysInSupportAndMoves) {
  const Eigen::Index n = 100;
  Rng rng(8);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = 0.5 * std_normal(rng);
  const Dataset d{gen_design(n, 1, {}, 1), y};
  ModelPriors pr = dp_priors(n, 1, 1);
  pr.dp.m0 = 6;
  pr.dp.trunc_mode = TruncationMode::kBvm;
  ChainState s = single_atom_state(n, 0.0, 1.0, 9);
  SamplerConfig c;
  c.log_sigma_step = 0.1;
  for (int k = 0; k < 2000; ++k) {
    update_sigma(s, d, pr, c);
    ASSERT_LE(s.mix.sigma * s.mix.sigma, pr.dp.sigma2_upper(n));
  }
  const double rate = static_cast<double>(s.sigma_accepts) / static_cast<double>(s.sigma_proposals);
  EXPECT_GT(rate, 0.05);
  EXPECT_LT(rate, 0.95);
}

TEST(LassoScales, LaplaceMarginalUnderPriorCycling) {
  ModelPriors pr = dp_priors(10, 1);
  pr.coef.lambda = 1.0;
  ChainState s = single_atom_state(1, 0.0, 1.0, 10);
  s.support = {0};
  s.values = Eigen::VectorXd::Constant(1, 0.5);
  s.lasso_scales = Eigen::VectorXd::Ones(1);
  std::vector<double> draws;
  const int cycles = 1000000;
  draws.reserve(cycles);
  for (int k = 0; k < cycles; ++k) {
    update_lasso_scales(s, pr);
    ASSERT_GT(s.lasso_scales[0], 0.0);
    s.values[0] = std::sqrt(s.lasso_scales[0]) * std_normal(s.rng);
    draws.push_back(s.values[0]);
  }
  EXPECT_NEAR(excess_kurtosis(draws), 3.0, 0.3);
  double var = 0.0;
  for (double v : draws) var += v * v;
  EXPECT_NEAR(var / cycles, 2.0, 0.05);
}

TEST(LassoScales, Deterministic) {
  ModelPriors pr = dp_priors(10, 3);
  ChainState a = single_atom_state(1, 0.0, 1.0, 11);
  a.support = {0, 2};
  a.values = (Eigen::VectorXd(2) << 0.3, -1.2).finished();
  a.lasso_scales = Eigen::VectorXd::Ones(2);
  ChainState b = a;
  update_lasso_scales(a, pr);
  update_lasso_scales(b, pr);
  EXPECT_EQ(a.lasso_scales, b.lasso_scales);
}

TEST(Model, FlipProbabilitiesAreComplementary) {
  const Dataset d = make_data(40, (Eigen::VectorXd(5) << 0.6, 0.0, -0.4, 0.0, 0.2).finished(), 1.0, 12);
  const ModelPriors pr = fixed_priors(40, 5);
  SamplerConfig c = fixed_config(10, 0);
  ChainState s = init(d, pr, c, 13);
  for (int k = 0; k < 5; ++k) sweep(s, d, pr, c);
  for (int j = 0; j < 5; ++j) {
    const double scale = 0.7 + j;
    ChainState out = s, in = s;
    const auto pos = std::lower_bound(s.support.begin(), s.support.end(), j) - s.support.begin();
    if (std::binary_search(s.support.begin(), s.support.end(), j)) {
      out.support.erase(out.support.begin() + pos);
      out.values = Eigen::VectorXd(out.support.size());
      out.lasso_scales = Eigen::VectorXd(out.support.size());
      for (std::size_t a = 0, b = 0; a < s.support.size(); ++a)
        if (s.support[a] != j) {
          out.values[b] = s.values[a];
          out.lasso_scales[b++] = s.lasso_scales[a];
        }
      in.lasso_scales[pos] = scale;
    } else {
      in.support.insert(in.support.begin() + pos, j);
      in.values = Eigen::VectorXd::Zero(in.support.size());
      in.lasso_scales = Eigen::VectorXd(in.support.size());
      for (std::size_t a = 0, b = 0; a < in.support.size(); ++a)
        in.lasso_scales[a] = in.support[a] == j ? scale : s.lasso_scales[b++];
    }
    const double leave_out = flip_probability(out, d, pr, j, scale);
    const double leave_in = flip_probability(in, d, pr, j, scale);
    EXPECT_NEAR(leave_out + leave_in, 1.0, 1e-12) << "j " << j;
  }
}

TEST(Model, ThetaConditionalClosedForm) {
  const Dataset d = make_data(30, (Eigen::VectorXd(4) << 1.0, 0.0, -0.5, 0.3).finished(), 1.0, 14);
  const ModelPriors pr = dp_priors(30, 4, 3);
  SamplerConfig c;
  ChainState s = init(d, pr, c, 15);
  s.support = {0, 2, 3};
  s.values = Eigen::VectorXd::Ones(3);
  s.lasso_scales = (Eigen::VectorXd(3) << 0.5, 2.0, 1.5).finished();
  for (Eigen::Index i = 0; i < 30; ++i) {
    s.alloc[i] = static_cast<int>(i % 3);
    s.sign[i] = i % 2 ? 1 : -1;
  }
  const GaussianConditional g = theta_conditional(s, d);
  const double s2 = s.mix.sigma * s.mix.sigma;
  const Eigen::MatrixXd xs = d.x.columns(s.support);
  Eigen::VectorXd pseudo = d.y;
  for (Eigen::Index i = 0; i < 30; ++i) pseudo[i] -= s.sign[i] * s.mix.atoms[s.alloc[i]];
  Eigen::MatrixXd q = xs.transpose() * xs / s2;
  q.diagonal() += s.lasso_scales.cwiseInverse();
  const Eigen::MatrixXd cov = q.inverse();
  const Eigen::VectorXd mean = cov * xs.transpose() * pseudo / s2;
  EXPECT_LE((g.mean - mean).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((g.cov - cov).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Model, SignallessDataFavoursEmptyModel) {
  const Dataset d = make_data(200, Eigen::VectorXd::Zero(5), 1.0, 16);
  const ModelPriors pr = fixed_priors(200, 5);
  const OracleResult o = exact_posterior(d, pr.coef, 1.0, false);
  EXPECT_GT(o.find({})->prob, 0.5);
  const ChainOutput chain = run_chain(d, pr, fixed_config(20000, 2000), 17);
  EXPECT_GT(model_frequencies(chain.samples)[Support{}], 0.5);
}

TEST(Model, StrongCoordinateAlwaysIncluded) {
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(5);
  theta[0] = 5.0;
  const Eigen::Index n = 50;
  const DesignMatrix x = gen_design(n, 5, {DesignKind::kIdentityBlock, 0.0}, 0);
  Rng rng(18);
  Eigen::VectorXd y = x.x() * theta;
  for (Eigen::Index i = 0; i < n; ++i) y[i] += std_normal(rng);
  const Dataset d{x, y};
  const ModelPriors pr = fixed_priors(n, 5);
  const OracleResult o = exact_posterior(d, pr.coef, 1.0, false);
  double with_first = 0.0;
  for (const auto &m : o.models)
    if (!m.skipped && !m.support.empty() && m.support[0] == 0) with_first += m.prob;
  EXPECT_GT(with_first, 0.99);
  const ChainOutput chain = run_chain(d, pr, fixed_config(5000, 500), 19);
  long hits = 0;
  for (const auto &s : chain.samples) hits += !s.support.empty() && s.support[0] == 0;
  EXPECT_GT(static_cast<double>(hits) / chain.samples.size(), 0.99);
}

TEST(Chain, MatchesOracleInFixedGaussianMode) {
  const Dataset d = make_data(40, (Eigen::VectorXd(3) << 0.5, 0.25, 0.0).finished(), 1.0, 20);
  const ModelPriors pr = fixed_priors(40, 3);
  const OracleResult o = exact_posterior(d, pr.coef, 1.0, false);
  const ChainOutput chain = run_chain(d, pr, fixed_config(60000, 10000), 21);
  EXPECT_LE(compare_to_chain(o, chain), 0.03);
}

TEST(Chain, Bookkeeping) {
  const Dataset d = make_data(30, (Eigen::VectorXd(4) << 1.0, 0.0, 0.0, 0.0).finished(), 1.0, 22);
  const ModelPriors pr = dp_priors(30, 4, 5);
  SamplerConfig c;
  c.sweeps = 20;
  c.thin = 3;
  c.burn_in = c.sweeps - c.thin;
  EXPECT_EQ(run_chain(d, pr, c, 1).samples.size(), 1u);
  c.burn_in = 5;
  c.thin = 1;
  const ChainOutput a = run_chain(d, pr, c, 1), b = run_chain(d, pr, c, 2), a2 = run_chain(d, pr, c, 1);
  EXPECT_EQ(a.samples.size(), 15u);
  EXPECT_EQ(a.data_hash, b.data_hash);
  bool differ = false;
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    differ = differ || a.samples[k].sigma != b.samples[k].sigma;
    EXPECT_EQ(a.samples[k].sigma, a2.samples[k].sigma);
    EXPECT_EQ(a.samples[k].values, a2.samples[k].values);
  }
  EXPECT_TRUE(differ);
}

TEST(Chain, StoredMixturesAreSymmetric) {
  const Dataset d = make_data(30, (Eigen::VectorXd(4) << 1.0, 0.0, 0.0, 0.0).finished(), 1.0, 23);
  SamplerConfig c;
  c.sweeps = 200;
  c.burn_in = 0;
  c.density_every = 10;
  const ChainOutput out = run_chain(d, dp_priors(30, 4, 8), c, 3);
  int snapshots = 0;
  for (const auto &s : out.samples) {
    if (!s.mixture) continue;
    ++snapshots;
    EXPECT_EQ(eval(*s.mixture, 0.77), eval(*s.mixture, -0.77));
    EXPECT_NEAR(s.mixture->weights.sum(), 1.0, 1e-12);
  }
  EXPECT_EQ(snapshots, 20);
}

TEST(Chain, CsvRoundTrip) {
  const Dataset d = make_data(30, (Eigen::VectorXd(4) << 1.0, -1.0, 0.0, 0.0).finished(), 1.0, 24);
  SamplerConfig c;
  c.sweeps = 50;
  c.burn_in = 10;
  const ChainOutput out = run_chain(d, dp_priors(30, 4, 5), c, 4);
  const auto path = std::filesystem::temp_directory_path() / "semibayes_chain_test.csv";
  write_chain_csv(out, path);
  const ChainOutput back = read_chain_csv(path);
  ASSERT_EQ(back.samples.size(), out.samples.size());
  for (std::size_t k = 0; k < out.samples.size(); ++k) {
    EXPECT_EQ(back.samples[k].support, out.samples[k].support);
    EXPECT_EQ(back.samples[k].values, out.samples[k].values);
    EXPECT_EQ(back.samples[k].sigma, out.samples[k].sigma);
    EXPECT_EQ(back.samples[k].log_post, out.samples[k].log_post);
  }
  std::filesystem::remove(path);
}

TEST(Config, Validation) {
  SamplerConfig c;
  c.burn_in = c.sweeps;
  EXPECT_THROW(c.validate(), ConfigError);
  c = SamplerConfig{};
  c.thin = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(SamplerConfig::from_json({{"mode", "rjmcmc"}}), ConfigError);
  EXPECT_EQ(SamplerConfig::from_json(SamplerConfig{}.to_json()).to_json(), SamplerConfig{}.to_json());
}

class Geweke : public ::testing::TestWithParam<int> {};

TEST_P(Geweke, SuccessiveMatchesMarginal) {
  const DesignMatrix x = gen_design(30, 5, {}, 3);
  ModelPriors pr{CoefPriorConfig::make(30, 5, 0.5, 2.0), DpPriorConfig{}};
  pr.dp.truncation = 5;
  pr.dp.m0 = GetParam();
  SamplerConfig c;
  const GewekeResult r = geweke_test(x, pr, c, 50000, 7);
  for (const auto &s : r.stats) EXPECT_LE(std::abs(s.z), 3.0) << s.name;
}

INSTANTIATE_TEST_SUITE_P(SigmaPriors, Geweke, ::testing::Values(2, 6));

TEST(GewekePower, DetectsWrongSigmaPrior) {
  const DesignMatrix x = gen_design(30, 5, {}, 3);
  ModelPriors pr{CoefPriorConfig::make(30, 5, 0.5, 2.0), DpPriorConfig{}};
  pr.dp.truncation = 5;
  ModelPriors wrong = pr;
  wrong.dp.b0 = 4.0;
  SamplerConfig c;
  EXPECT_GT(geweke_test(x, pr, c, 20000, 8, 50, &wrong).max_abs_z(), 3.0);
}

TEST(Init, TopCorrelationsWithLeastSquares) {
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(12);
  theta[2] = 2.0;
  theta[5] = -1.5;
  theta[9] = 1.0;
  const Dataset d = make_data(80, theta, 1.0, 25);
  SamplerConfig c;
  c.init_size = 3;
  const ChainState s = init(d, dp_priors(80, 12), c, 1);
  EXPECT_EQ(s.support, (Support{2, 5, 9}));
  const Eigen::MatrixXd xs = d.x.columns(s.support);
  const Eigen::VectorXd ols = (xs.transpose() * xs).ldlt().solve(xs.transpose() * d.y);
  EXPECT_LE((s.values - ols).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_EQ(s.lasso_scales.size(), 3);
  c.init_size = 100;
  EXPECT_EQ(init(d, dp_priors(80, 12), c, 1).support.size(), 12u);
}

TEST(Sweep, FrozenSupportIsKept) {
  const Dataset d = make_data(40, (Eigen::VectorXd(6) << 1.0, 0.0, 0.0, 0.0, 0.0, 0.0).finished(), 1.0, 26);
  const ModelPriors pr = dp_priors(40, 6, 5);
  SamplerConfig c;
  c.init_size = 4;
  ChainState s = init(d, pr, c, 2);
  const Support start = s.support;
  for (int k = 0; k < 50; ++k) sweep(s, d, pr, c, false);
  EXPECT_EQ(s.support, start);
  EXPECT_EQ(s.flip_proposals, 0);
  c.sweeps = 10;
  c.burn_in = 5;
  c.warmup_frozen = 6;
  EXPECT_THROW(c.validate(), ConfigError);
}
