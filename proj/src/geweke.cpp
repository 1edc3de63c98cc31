#include "semibayes/geweke.hpp"

#include <cmath>

#include "semibayes/errors.hpp"

namespace semibayes {

namespace {

struct Moments {
  std::vector<double> values;

  double mean() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
  }

  double iid_se() const {
    const double m = mean();
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    const double n = static_cast<double>(values.size());
    return std::sqrt(ss / (n - 1.0) / n);
  }

  double batch_se(int batches) const {
    const auto len = values.size() / static_cast<std::size_t>(batches);
    std::vector<double> means(static_cast<std::size_t>(batches), 0.0);
    for (int b = 0; b < batches; ++b) {
      for (std::size_t k = 0; k < len; ++k) means[b] += values[b * len + k];
      means[b] /= static_cast<double>(len);
    }
    double m = 0.0;
    for (double v : means) m += v;
    m /= batches;
    double ss = 0.0;
    for (double v : means) ss += (v - m) * (v - m);
    return std::sqrt(ss / (batches - 1.0) / batches);
  }
};

void record(const ChainState &s, std::vector<Moments> &out) {
  const double size = static_cast<double>(s.support.size());
  const double atom = s.mix.atoms[0];
  out[0].values.push_back(s.mix.sigma);
  out[1].values.push_back(s.mix.sigma * s.mix.sigma);
  out[2].values.push_back(size);
  out[3].values.push_back(size * size);
  out[4].values.push_back(atom);
  out[5].values.push_back(atom * atom);
}

}  // namespace

ChainState sample_joint_prior(const DesignMatrix &x, const ModelPriors &priors, Rng &rng,
                              Eigen::VectorXd *y) {
  const Eigen::Index n = x.n();
  const Eigen::Index p = x.p();
  const auto &coef = priors.coef;
  ChainState st;

  Eigen::ArrayXd log_sizes(coef.max_size + 1);
  for (Eigen::Index s = 0; s <= coef.max_size; ++s) log_sizes[s] = coef.log_size_prior(s);
  const Eigen::Index k = categorical_from_log(rng, log_sizes);
  std::vector<int> idx(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) idx[j] = static_cast<int>(j);
  for (Eigen::Index a = 0; a < k; ++a) {
    const auto pick = a + static_cast<Eigen::Index>(uniform01(rng) * static_cast<double>(p - a));
    std::swap(idx[a], idx[std::min(pick, p - 1)]);
  }
  st.support.assign(idx.begin(), idx.begin() + k);
  std::sort(st.support.begin(), st.support.end());
  st.values.resize(k);
  st.lasso_scales.resize(k);
  for (Eigen::Index a = 0; a < k; ++a) {
    // Laplace(lambda) through its scale mixture.
    st.lasso_scales[a] = -std::log(uniform01(rng)) * 2.0 / (coef.lambda * coef.lambda);
    st.values[a] = std::sqrt(st.lasso_scales[a]) * std_normal(rng);
  }

  const int h = priors.dp.truncation;
  st.sticks.resize(h - 1);
  for (int a = 0; a + 1 < h; ++a) st.sticks[a] = beta(rng, 1.0, priors.dp.alpha_mass);
  st.mix.weights = weights_from_sticks(st.sticks, h);
  st.mix.atoms.resize(h);
  for (int a = 0; a < h; ++a) st.mix.atoms[a] = sample_base_atom(priors.dp, n, rng);
  st.mix.sigma = sample_sigma_prior(priors.dp, n, rng);

  st.alloc.resize(n);
  st.sign.resize(n);
  const Eigen::ArrayXd logw = st.mix.weights.array().log();
  for (Eigen::Index i = 0; i < n; ++i) {
    st.alloc[i] = static_cast<int>(categorical_from_log(rng, logw));
    st.sign[i] = uniform01(rng) < 0.5 ? 1 : -1;
  }
  st.rng = Rng(rng());
  *y = sample_response(st, x, rng);
  return st;
}

Eigen::VectorXd sample_response(const ChainState &state, const DesignMatrix &x, Rng &rng) {
  Eigen::VectorXd y(x.n());
  for (Eigen::Index i = 0; i < x.n(); ++i) {
    double mean = state.sign[i] * state.mix.atoms[state.alloc[i]];
    for (std::size_t a = 0; a < state.support.size(); ++a)
      mean += x.x()(i, state.support[a]) * state.values[static_cast<Eigen::Index>(a)];
    y[i] = mean + state.mix.sigma * std_normal(rng);
  }
  return y;
}

double GewekeResult::max_abs_z() const {
  double m = 0.0;
  for (const auto &s : stats) m = std::max(m, std::abs(s.z));
  return m;
}

nlohmann::json GewekeResult::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto &s : stats)
    rows.push_back({{"name", s.name},
                    {"marginal_mean", s.marginal_mean},
                    {"marginal_se", s.marginal_se},
                    {"successive_mean", s.successive_mean},
                    {"successive_se", s.successive_se},
                    {"z", s.z}});
  return {{"cycles", cycles}, {"stats", rows}, {"max_abs_z", max_abs_z()}};
}

GewekeResult geweke_test(const DesignMatrix &x, const ModelPriors &priors,
                         const SamplerConfig &config, long cycles, std::uint64_t seed,
                         int batches, const ModelPriors *sweep_priors) {
  if (config.mode != SamplerMode::kDp) throw ParameterError("geweke_test: needs the dp mode");
  if (cycles < 2L * batches || batches < 2) throw ParameterError("geweke_test: too few cycles");
  priors.dp.validate();
  priors.coef.validate();
  Rng rng(seed);
  std::vector<Moments> marginal(6), successive(6);

  for (long c = 0; c < cycles; ++c) {
    Eigen::VectorXd y;
    record(sample_joint_prior(x, priors, rng, &y), marginal);
  }

  Eigen::VectorXd y;
  ChainState state = sample_joint_prior(x, priors, rng, &y);
  Dataset data{x, y};
  for (long c = 0; c < cycles; ++c) {
    sweep(state, data, sweep_priors ? *sweep_priors : priors, config);
    data.y = sample_response(state, x, rng);
    record(state, successive);
  }

  static const char *names[] = {"sigma", "sigma^2", "size", "size^2", "atom1", "atom1^2"};
  GewekeResult out;
  out.cycles = cycles;
  for (int k = 0; k < 6; ++k) {
    GewekeStatistic s;
    s.name = names[k];
    s.marginal_mean = marginal[k].mean();
    s.marginal_se = marginal[k].iid_se();
    s.successive_mean = successive[k].mean();
    s.successive_se = successive[k].batch_se(batches);
    const double se = std::hypot(s.marginal_se, s.successive_se);
    s.z = se > 0.0 ? (s.successive_mean - s.marginal_mean) / se : 0.0;
    out.stats.push_back(s);
  }
  return out;
}

}  // namespace semibayes
