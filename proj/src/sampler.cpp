#include "semibayes/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "semibayes/csv.hpp"
#include "semibayes/errors.hpp"

namespace semibayes {

namespace {

constexpr double kSigmaFloor = 1e-3;
constexpr double kJitter = 1e-10;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool is_fixed(const SamplerConfig &config) { return config.mode == SamplerMode::kFixedGaussian; }

double lasso_prior_draw(Rng &rng, double lambda) {
  // Exponential with rate lambda^2 / 2.
  return -std::log(uniform01(rng)) * 2.0 / (lambda * lambda);
}

double lasso_conditional_draw(Rng &rng, double lambda, double theta) {
  if (theta == 0.0) return lasso_prior_draw(rng, lambda);
  return 1.0 / inverse_gaussian(rng, lambda / std::abs(theta), lambda * lambda);
}

// Cholesky of Q = n Sigma_S / sigma^2 + diag(1/scales), jittered on failure.
Eigen::LLT<Eigen::MatrixXd> precision_factor(const Dataset &data, double sigma2,
                                             const Support &s,
                                             const Eigen::VectorXd &scales,
                                             long *jitter_events) {
  const auto k = static_cast<Eigen::Index>(s.size());
  Eigen::MatrixXd q(k, k);
  const double scale = static_cast<double>(data.n()) / sigma2;
  const auto &g = data.x.gram();
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b <= a; ++b) q(a, b) = q(b, a) = scale * g(s[a], s[b]);
    q(a, a) += 1.0 / scales[a];
  }
  Eigen::LLT<Eigen::MatrixXd> llt(q);
  double ridge = kJitter;
  while (llt.info() != Eigen::Success) {
    if (jitter_events) ++*jitter_events;
    q.diagonal().array() += ridge;
    llt.compute(q);
    ridge *= 10.0;
    if (ridge > 1.0) throw NumericError("precision matrix is not positive definite");
  }
  return llt;
}

// Support evaluation with X_j^T pseudo cached across one round of flips.
class SupportEvaluator {
 public:
  SupportEvaluator(const Dataset &data, const Eigen::VectorXd &pseudo, double sigma,
                   long *jitter_events)
      : data_(data),
        pseudo_(pseudo),
        sigma2_(sigma * sigma),
        xty_(data.p()),
        have_(static_cast<std::size_t>(data.p()), 0),
        jitter_events_(jitter_events) {}

  double xty(int j) {
    if (!have_[j]) {
      xty_[j] = data_.x.x().col(j).dot(pseudo_);
      have_[j] = 1;
    }
    return xty_[j];
  }

  double log_marginal(const Support &s, const Eigen::VectorXd &scales) {
    const auto k = static_cast<Eigen::Index>(s.size());
    if (k == 0) return 0.0;
    const auto llt = precision_factor(data_, sigma2_, s, scales, jitter_events_);
    Eigen::VectorXd b(k);
    for (Eigen::Index a = 0; a < k; ++a) b[a] = xty(s[a]) / sigma2_;
    const Eigen::VectorXd w = llt.matrixL().solve(b);
    const double logdet = llt.matrixLLT().diagonal().array().log().sum();  // half log|Q|
    return 0.5 * w.squaredNorm() - logdet - 0.5 * scales.array().log().sum();
  }

 private:
  const Dataset &data_;
  const Eigen::VectorXd &pseudo_;
  double sigma2_;
  Eigen::VectorXd xty_;
  std::vector<char> have_;
  long *jitter_events_;
};

template <typename Vec>
Vec erase_at(const Vec &v, Eigen::Index pos) {
  Vec out(v.size() - 1);
  out.head(pos) = v.head(pos);
  out.tail(v.size() - 1 - pos) = v.tail(v.size() - 1 - pos);
  return out;
}

template <typename Vec>
Vec insert_at(const Vec &v, Eigen::Index pos, double value) {
  Vec out(v.size() + 1);
  out.head(pos) = v.head(pos);
  out[pos] = value;
  out.tail(v.size() - pos) = v.tail(v.size() - pos);
  return out;
}

Eigen::Index lower_position(const Support &s, int j) {
  return std::lower_bound(s.begin(), s.end(), j) - s.begin();
}

double log_odds_inclusion(SupportEvaluator &eval, const ChainState &state,
                          const ModelPriors &priors, int j, double scale_j,
                          double current_lml) {
  const Eigen::Index pos = lower_position(state.support, j);
  const bool active = pos < static_cast<Eigen::Index>(state.support.size()) &&
                      state.support[pos] == j;
  const auto k = static_cast<Eigen::Index>(state.support.size());
  double lml_in, lml_out;
  Eigen::Index k_in, k_out;
  if (active) {
    Support out = state.support;
    out.erase(out.begin() + pos);
    lml_in = current_lml;
    lml_out = eval.log_marginal(out, erase_at(state.lasso_scales, pos));
    k_in = k;
    k_out = k - 1;
  } else {
    k_in = k + 1;
    k_out = k;
    lml_out = current_lml;
    if (k_in > priors.coef.max_size) return kNegInf;
    Support in = state.support;
    in.insert(in.begin() + pos, j);
    lml_in = eval.log_marginal(in, insert_at(state.lasso_scales, pos, scale_j));
  }
  return lml_in + priors.coef.log_model_prior(k_in) - lml_out -
         priors.coef.log_model_prior(k_out);
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

void SamplerConfig::validate() const {
  if (!(sweeps > burn_in) || burn_in < 0) throw ConfigError("sampler: need sweeps > burn_in >= 0");
  if (thin < 1) throw ConfigError("sampler: thin must be at least 1");
  if (flips_per_sweep < 1) throw ConfigError("sampler: flips_per_sweep must be positive");
  if (!(log_sigma_step > 0.0)) throw ConfigError("sampler: log_sigma_step must be positive");
  if (density_every < 1) throw ConfigError("sampler: density_every must be positive");
  if (init_size < 1) throw ConfigError("sampler: init_size must be positive");
  if (warmup_frozen < 0 || warmup_frozen > burn_in)
    throw ConfigError("sampler: warmup_frozen must lie in [0, burn_in]");
}

nlohmann::json SamplerConfig::to_json() const {
  return {{"sweeps", sweeps},
          {"burn_in", burn_in},
          {"thin", thin},
          {"flips_per_sweep", flips_per_sweep},
          {"log_sigma_step", log_sigma_step},
          {"mode", mode == SamplerMode::kDp ? "dp" : "fixed_gaussian"},
          {"density_every", density_every},
          {"init_size", init_size},
          {"warmup_frozen", warmup_frozen}};
}

SamplerConfig SamplerConfig::from_json(const nlohmann::json &j) {
  SamplerConfig c;
  c.sweeps = j.value("sweeps", c.sweeps);
  c.burn_in = j.value("burn_in", c.burn_in);
  c.thin = j.value("thin", c.thin);
  c.flips_per_sweep = j.value("flips_per_sweep", c.flips_per_sweep);
  c.log_sigma_step = j.value("log_sigma_step", c.log_sigma_step);
  c.density_every = j.value("density_every", c.density_every);
  c.init_size = j.value("init_size", c.init_size);
  c.warmup_frozen = j.value("warmup_frozen", c.warmup_frozen);
  const std::string mode = j.value("mode", std::string("dp"));
  if (mode == "dp") {
    c.mode = SamplerMode::kDp;
  } else if (mode == "fixed_gaussian") {
    c.mode = SamplerMode::kFixedGaussian;
  } else {
    throw ConfigError("sampler: mode must be 'dp' or 'fixed_gaussian'");
  }
  c.validate();
  return c;
}

void ChainState::validate(Eigen::Index n) const {
  if (static_cast<Eigen::Index>(support.size()) != values.size() ||
      values.size() != lasso_scales.size())
    throw ParameterError("chain state: support, values and lasso scales disagree");
  if (alloc.size() != n || sign.size() != n)
    throw ParameterError("chain state: allocations or signs have wrong length");
  if ((lasso_scales.array() <= 0.0).any())
    throw ParameterError("chain state: lasso scales must be positive");
  mix.validate();
}

Eigen::VectorXd residuals(const ChainState &state, const Dataset &data) {
  Eigen::VectorXd r = data.y;
  for (std::size_t k = 0; k < state.support.size(); ++k)
    r -= state.values[static_cast<Eigen::Index>(k)] * data.x.x().col(state.support[k]);
  return r;
}

Eigen::VectorXd pseudo_response(const ChainState &state, const Dataset &data) {
  Eigen::VectorXd out = data.y;
  for (Eigen::Index i = 0; i < data.n(); ++i)
    out[i] -= state.sign[i] * state.mix.atoms[state.alloc[i]];
  return out;
}

ChainState init(const Dataset &data, const ModelPriors &priors, const SamplerConfig &config,
                std::uint64_t seed) {
  const Eigen::Index n = data.n();
  const Eigen::Index p = data.p();
  if (n < 2) throw ParameterError("init: need at least two observations");
  if (data.y.size() != n) throw ParameterError("init: response length differs from n");
  config.validate();
  priors.dp.validate();

  ChainState st;
  st.rng = Rng(seed);

  // Largest absolute marginal correlations.
  const Eigen::VectorXd yc = data.y.array() - data.y.mean();
  const double ynorm = yc.norm();
  std::vector<std::pair<double, int>> corr(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) {
    const Eigen::VectorXd xc = data.x.x().col(j).array() - data.x.x().col(j).mean();
    const double denom = xc.norm() * ynorm;
    corr[j] = {denom > 0.0 ? std::abs(xc.dot(yc)) / denom : 0.0, static_cast<int>(j)};
  }
  const auto k = static_cast<std::size_t>(
      std::min<Eigen::Index>({config.init_size, priors.coef.max_size, p, n - 1}));
  std::stable_sort(corr.begin(), corr.end(),
                   [](const auto &a, const auto &b) { return a.first > b.first; });
  for (std::size_t a = 0; a < std::max<std::size_t>(k, 1); ++a) st.support.push_back(corr[a].second);
  std::sort(st.support.begin(), st.support.end());
  const Eigen::MatrixXd xs = data.x.columns(st.support);
  st.values = xs.colPivHouseholderQr().solve(data.y);
  for (Eigen::Index a = 0; a < st.values.size(); ++a)
    if (!std::isfinite(st.values[a])) st.values[a] = 0.0;

  const Eigen::VectorXd r = data.y - xs * st.values;
  st.alloc = Eigen::VectorXi::Zero(n);
  st.sign.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) st.sign[i] = r[i] < 0.0 ? -1 : 1;

  if (is_fixed(config)) {
    st.mix.weights = Eigen::VectorXd::Ones(1);
    st.mix.atoms = Eigen::VectorXd::Zero(1);
    st.mix.sigma = priors.dp.fixed_sigma.value_or(1.0);
  } else {
    const int h = priors.dp.truncation;
    st.sticks.resize(h - 1);
    for (int k = 0; k + 1 < h; ++k) st.sticks[k] = beta(st.rng, 1.0, priors.dp.alpha_mass);
    st.mix.weights = weights_from_sticks(st.sticks, h);
    st.mix.atoms.resize(h);
    for (int k = 0; k < h; ++k) st.mix.atoms[k] = sample_base_atom(priors.dp, n, st.rng);
    if (priors.dp.fixed_sigma) {
      st.mix.sigma = *priors.dp.fixed_sigma;
    } else {
      const double sd = std::sqrt((r.array() - r.mean()).square().sum() / static_cast<double>(n - 1));
      st.mix.sigma = std::clamp(sd, kSigmaFloor, std::sqrt(priors.dp.sigma2_upper(n)));
    }
  }
  st.lasso_scales.resize(st.values.size());
  for (Eigen::Index a = 0; a < st.values.size(); ++a)
    st.lasso_scales[a] = lasso_conditional_draw(st.rng, priors.coef.lambda, st.values[a]);
  return st;
}

void update_signs_allocs(ChainState &state, const Dataset &data) {
  const Eigen::VectorXd r = residuals(state, data);
  const Eigen::Index h = state.mix.size();
  const double inv2s2 = 1.0 / (2.0 * state.mix.sigma * state.mix.sigma);
  Eigen::ArrayXd logw(h);
  for (Eigen::Index k = 0; k < h; ++k)
    logw[k] = state.mix.weights[k] > 0.0 ? std::log(state.mix.weights[k]) : kNegInf;
  const Eigen::ArrayXd z = state.mix.atoms.array();
  Eigen::ArrayXd logits(2 * h), probs(2 * h);
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    logits.head(h) = logw - (r[i] - z).square() * inv2s2;
    logits.tail(h) = logw - (r[i] + z).square() * inv2s2;
    probs = (logits - logits.maxCoeff()).exp();
    double u = uniform01(state.rng) * probs.sum();
    Eigen::Index pick = 2 * h - 1;
    for (Eigen::Index k = 0; k < 2 * h; ++k) {
      u -= probs[k];
      if (u <= 0.0 && probs[k] > 0.0) {
        pick = k;
        break;
      }
    }
    state.alloc[i] = static_cast<int>(pick % h);
    state.sign[i] = pick < h ? 1 : -1;
  }
}

void update_atoms(ChainState &state, const Dataset &data, const ModelPriors &priors) {
  const Eigen::Index h = state.mix.size();
  const Eigen::VectorXd r = residuals(state, data);
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(h);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(h);
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    sums[state.alloc[i]] += state.sign[i] * r[i];
    counts[state.alloc[i]] += 1.0;
  }
  const double s2 = state.mix.sigma * state.mix.sigma;
  const double base = priors.dp.base_scale;
  const double w = priors.dp.half_width(data.n());
  for (Eigen::Index k = 0; k < h; ++k) {
    if (base == 0.0) {
      state.mix.atoms[k] = 0.0;
      continue;
    }
    if (counts[k] == 0.0) {
      state.mix.atoms[k] = sample_base_atom(priors.dp, data.n(), state.rng);
      continue;
    }
    const double v = 1.0 / (1.0 / (base * base) + counts[k] / s2);
    const double m = v * sums[k] / s2;
    state.mix.atoms[k] = truncated_normal(state.rng, m, std::sqrt(v), -w, w);
  }
}

void update_sticks(ChainState &state, const ModelPriors &priors) {
  const Eigen::Index h = state.mix.size();
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(h);
  for (Eigen::Index i = 0; i < state.alloc.size(); ++i) counts[state.alloc[i]] += 1.0;
  double tail = counts.sum();
  for (Eigen::Index k = 0; k + 1 < h; ++k) {
    tail -= counts[k];
    state.sticks[k] = beta(state.rng, 1.0 + counts[k], priors.dp.alpha_mass + tail);
  }
  state.mix.weights = weights_from_sticks(state.sticks, static_cast<int>(h));
}

void update_sigma(ChainState &state, const Dataset &data, const ModelPriors &priors,
                  const SamplerConfig &config) {
  if (priors.dp.fixed_sigma) return;
  const Eigen::VectorXd r = residuals(state, data);
  double ssr = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const double e = r[i] - state.sign[i] * state.mix.atoms[state.alloc[i]];
    ssr += e * e;
  }
  const double n = static_cast<double>(data.n());
  const double upper = priors.dp.sigma2_upper(data.n());
  if (priors.dp.m0 == 2) {
    const double shape = priors.dp.a0 + 0.5 * n;
    const double rate = priors.dp.b0 + 0.5 * ssr;
    const double precision =
        truncated_gamma(state.rng, shape, rate, std::isinf(upper) ? 0.0 : 1.0 / upper,
                        std::numeric_limits<double>::infinity());
    state.mix.sigma = 1.0 / std::sqrt(precision);
    return;
  }
  // Random-walk Metropolis on log sigma; the +log sigma term is the Jacobian.
  auto log_target = [&](double sigma) {
    return log_sigma_prior(priors.dp, sigma) + std::log(sigma) - n * std::log(sigma) -
           0.5 * ssr / (sigma * sigma);
  };
  const double current = state.mix.sigma;
  const double proposal = current * std::exp(config.log_sigma_step * std_normal(state.rng));
  ++state.sigma_proposals;
  const double u = uniform01(state.rng);
  if (proposal * proposal > upper) return;
  if (std::log(u) < log_target(proposal) - log_target(current)) {
    state.mix.sigma = proposal;
    ++state.sigma_accepts;
  }
}

void update_lasso_scales(ChainState &state, const ModelPriors &priors) {
  for (Eigen::Index k = 0; k < state.values.size(); ++k)
    state.lasso_scales[k] = lasso_conditional_draw(state.rng, priors.coef.lambda, state.values[k]);
}

double log_marginal(const Dataset &data, const Eigen::VectorXd &pseudo, double sigma,
                    const Support &s, const Eigen::VectorXd &scales, long *jitter_events) {
  SupportEvaluator eval(data, pseudo, sigma, jitter_events);
  return eval.log_marginal(s, scales);
}

double flip_probability(const ChainState &state, const Dataset &data, const ModelPriors &priors,
                        int j, double scale_j) {
  const Eigen::VectorXd pseudo = pseudo_response(state, data);
  SupportEvaluator eval(data, pseudo, state.mix.sigma, nullptr);
  const double current = eval.log_marginal(state.support, state.lasso_scales);
  const double odds = log_odds_inclusion(eval, state, priors, j, scale_j, current);
  const bool active = std::binary_search(state.support.begin(), state.support.end(), j);
  const double p_in = logistic(odds);
  return active ? 1.0 - p_in : p_in;
}

void update_model(ChainState &state, const Dataset &data, const ModelPriors &priors,
                  const SamplerConfig &config) {
  const Eigen::VectorXd pseudo = pseudo_response(state, data);
  SupportEvaluator eval(data, pseudo, state.mix.sigma, &state.jitter_events);
  const auto p = static_cast<int>(data.p());

  std::vector<int> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), 0);
  const int count = std::min(p, config.flips_per_sweep);
  // Uniform random subset (or permutation) chosen independently of the state.
  for (int k = 0; k < count; ++k) {
    const int pick = k + static_cast<int>(uniform01(state.rng) * static_cast<double>(p - k));
    std::swap(order[k], order[std::min(pick, p - 1)]);
  }

  double current = eval.log_marginal(state.support, state.lasso_scales);
  for (int step = 0; step < count; ++step) {
    const int j = order[step];
    const Eigen::Index pos = lower_position(state.support, j);
    const bool active = pos < static_cast<Eigen::Index>(state.support.size()) &&
                        state.support[pos] == j;
    const double scale_j =
        active ? state.lasso_scales[pos] : lasso_prior_draw(state.rng, priors.coef.lambda);
    const double odds = log_odds_inclusion(eval, state, priors, j, scale_j, current);
    const bool include = uniform01(state.rng) < logistic(odds);
    ++state.flip_proposals;
    if (include == active) continue;
    ++state.flip_changes;
    if (include) {
      state.support.insert(state.support.begin() + pos, j);
      state.values = insert_at(state.values, pos, 0.0);
      state.lasso_scales = insert_at(state.lasso_scales, pos, scale_j);
    } else {
      state.support.erase(state.support.begin() + pos);
      state.values = erase_at(state.values, pos);
      state.lasso_scales = erase_at(state.lasso_scales, pos);
    }
    current = eval.log_marginal(state.support, state.lasso_scales);
  }
}

GaussianConditional theta_conditional(const ChainState &state, const Dataset &data) {
  const double sigma2 = state.mix.sigma * state.mix.sigma;
  const auto k = static_cast<Eigen::Index>(state.support.size());
  GaussianConditional out;
  if (k == 0) return out;
  const Eigen::VectorXd pseudo = pseudo_response(state, data);
  const auto llt = precision_factor(data, sigma2, state.support, state.lasso_scales, nullptr);
  const Eigen::VectorXd b = data.x.columns(state.support).transpose() * pseudo / sigma2;
  out.mean = llt.solve(b);
  out.cov = llt.solve(Eigen::MatrixXd::Identity(k, k));
  return out;
}

void update_theta(ChainState &state, const Dataset &data, const ModelPriors &priors) {
  (void)priors;
  const auto k = static_cast<Eigen::Index>(state.support.size());
  if (k == 0) return;
  const double sigma2 = state.mix.sigma * state.mix.sigma;
  const Eigen::VectorXd pseudo = pseudo_response(state, data);
  const auto llt =
      precision_factor(data, sigma2, state.support, state.lasso_scales, &state.jitter_events);
  Eigen::VectorXd b(k);
  for (Eigen::Index a = 0; a < k; ++a)
    b[a] = data.x.x().col(state.support[a]).dot(pseudo) / sigma2;
  const Eigen::VectorXd mean = llt.solve(b);
  Eigen::VectorXd z(k);
  for (Eigen::Index a = 0; a < k; ++a) z[a] = std_normal(state.rng);
  state.values = mean + llt.matrixU().solve(z);
}

void sweep(ChainState &state, const Dataset &data, const ModelPriors &priors,
           const SamplerConfig &config, bool flips) {
  if (!is_fixed(config)) {
    update_signs_allocs(state, data);
    update_atoms(state, data, priors);
    update_sticks(state, priors);
    update_sigma(state, data, priors, config);
  }
  update_lasso_scales(state, priors);
  if (flips) update_model(state, data, priors, config);
  update_theta(state, data, priors);
}

double log_posterior(const ChainState &state, const Dataset &data, const ModelPriors &priors,
                     const SamplerConfig &config) {
  const Eigen::VectorXd r = residuals(state, data);
  double lp = priors.coef.log_model_prior(static_cast<Eigen::Index>(state.support.size())) +
              priors.coef.log_slab(state.values);
  if (is_fixed(config)) {
    const double s = state.mix.sigma;
    return lp - 0.5 * r.squaredNorm() / (s * s) -
           static_cast<double>(data.n()) * (std::log(s) + 0.5 * std::log(2.0 * std::numbers::pi));
  }
  lp += log_lik(state.mix, r);
  if (!priors.dp.fixed_sigma) lp += log_sigma_prior(priors.dp, state.mix.sigma);
  const double base = priors.dp.base_scale;
  if (base > 0.0) lp -= 0.5 * state.mix.atoms.squaredNorm() / (base * base);
  const double a = priors.dp.alpha_mass;
  for (Eigen::Index k = 0; k < state.sticks.size(); ++k)
    lp += std::log(a) + (a - 1.0) * std::log1p(-std::min(state.sticks[k], 1.0 - 1e-16));
  return lp;
}

ChainOutput run_chain(const Dataset &data, const ModelPriors &priors, const SamplerConfig &config,
                      std::uint64_t seed) {
  ChainState state = init(data, priors, config, seed);
  ChainOutput out;
  out.config = config;
  out.seed = seed;
  out.data_hash = data.hash();
  out.samples.reserve(static_cast<std::size_t>((config.sweeps - config.burn_in) / config.thin));
  std::vector<char> used;
  for (int it = 1; it <= config.sweeps; ++it) {
    sweep(state, data, priors, config, it > config.warmup_frozen);
    if (it <= config.burn_in || (it - config.burn_in) % config.thin != 0) continue;
    ChainSample s;
    s.iteration = it;
    s.support = state.support;
    s.values = state.values;
    s.sigma = state.mix.sigma;
    s.first_atom = state.mix.atoms[0];
    used.assign(static_cast<std::size_t>(state.mix.size()), 0);
    for (Eigen::Index i = 0; i < state.alloc.size(); ++i) used[state.alloc[i]] = 1;
    s.occupied = static_cast<int>(std::count(used.begin(), used.end(), 1));
    s.log_post = log_posterior(state, data, priors, config);
    if (out.samples.size() % static_cast<std::size_t>(config.density_every) == 0)
      s.mixture = state.mix;
    out.samples.push_back(std::move(s));
  }
  out.sigma_acceptance = state.sigma_proposals > 0
                             ? static_cast<double>(state.sigma_accepts) /
                                   static_cast<double>(state.sigma_proposals)
                             : 1.0;
  out.flip_rate = state.flip_proposals > 0 ? static_cast<double>(state.flip_changes) /
                                                 static_cast<double>(state.flip_proposals)
                                           : 0.0;
  out.jitter_events = state.jitter_events;
  return out;
}

void write_chain_csv(const ChainOutput &chain, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot write " + path.string());
  out << "iteration,size,support,theta,sigma,log_post\n";
  for (const auto &s : chain.samples) {
    std::vector<double> vals(s.values.data(), s.values.data() + s.values.size());
    out << s.iteration << ',' << s.support.size() << ',' << join_ints(s.support) << ','
        << join_doubles(vals) << ',' << format_double(s.sigma) << ','
        << format_double(s.log_post) << '\n';
  }
}

ChainOutput read_chain_csv(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  if (line.rfind("iteration,size,support,theta,sigma,log_post", 0) != 0)
    throw ParameterError("chain file has an unexpected header");
  ChainOutput out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 6) throw ParameterError("chain row has wrong width");
    ChainSample s;
    s.iteration = std::stoi(cells[0]);
    s.support = parse_ints(cells[2]);
    const auto vals = parse_doubles(cells[3]);
    s.values = Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
    s.sigma = std::stod(cells[4]);
    s.log_post = std::stod(cells[5]);
    if (static_cast<int>(s.support.size()) != std::stoi(cells[1]) ||
        s.support.size() != vals.size())
      throw ParameterError("chain row has inconsistent support");
    out.samples.push_back(std::move(s));
  }
  return out;
}

nlohmann::json chain_sidecar(const ChainOutput &chain, const ModelPriors &priors) {
  std::ostringstream hash;
  hash << std::hex << chain.data_hash;
  return {{"seed", chain.seed},
          {"data_hash", hash.str()},
          {"samples", chain.samples.size()},
          {"acceptance", {{"sigma_mh", chain.sigma_acceptance}, {"support_flip", chain.flip_rate}}},
          {"jitter_events", chain.jitter_events},
          {"sampler", chain.config.to_json()},
          {"coef_prior", priors.coef.to_json()},
          {"dpmix", priors.dp.to_json()}};
}

}  // namespace semibayes
