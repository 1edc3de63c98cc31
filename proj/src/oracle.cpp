#include "semibayes/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include "semibayes/errors.hpp"

namespace semibayes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLog2Pi = std::log(2.0 * std::numbers::pi);

double log_ndtr(double x) {
  if (x > 5.0) return std::log1p(-0.5 * std::erfc(x / std::numbers::sqrt2));
  if (x > -37.0) return std::log(0.5 * std::erfc(-x / std::numbers::sqrt2));
  const double r = 1.0 / (x * x);
  const double series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r)));
  return -0.5 * x * x - std::log(-x) - 0.5 * kLog2Pi + std::log(series);
}

double log_normal_pdf(double x, double mean, double var) {
  return -0.5 * (x - mean) * (x - mean) / var - 0.5 * std::log(var) - 0.5 * kLog2Pi;
}

double log_sum_exp(const std::vector<double> &v) {
  double hi = kNegInf;
  for (double x : v) hi = std::max(hi, x);
  if (!std::isfinite(hi)) return hi;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

// Conditional law of the remaining coordinates given coordinate j = value.
struct Conditional {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

Conditional condition_on(const Eigen::VectorXd &mean, const Eigen::MatrixXd &cov, Eigen::Index j,
                         double value) {
  const Eigen::Index d = mean.size();
  Eigen::VectorXi rest(d - 1);
  for (Eigen::Index a = 0, t = 0; a < d; ++a)
    if (a != j) rest[t++] = static_cast<int>(a);
  Conditional c;
  c.mean.resize(d - 1);
  c.cov.resize(d - 1, d - 1);
  const double vjj = cov(j, j);
  for (Eigen::Index a = 0; a < d - 1; ++a) {
    c.mean[a] = mean[rest[a]] + cov(rest[a], j) * (value - mean[j]) / vjj;
    for (Eigen::Index b = 0; b < d - 1; ++b)
      c.cov(a, b) = cov(rest[a], rest[b]) - cov(rest[a], j) * cov(j, rest[b]) / vjj;
  }
  return c;
}

// log int_0^inf exp(f(y)) dy for concave f whose curvature is at most -1/var.
template <typename F>
double log_integral_concave(const F &f, double center, double sd) {
  // Bracket the mode, then Brent.
  double hi = std::max(center, 0.0) + 10.0 * sd;
  while (f(hi + 0.1 * sd) > f(hi)) hi *= 2.0;
  boost::uintmax_t iters = 200;
  const auto found = boost::math::tools::brent_find_minima([&](double y) { return -f(y); }, 0.0,
                                                           hi, 60, iters);
  const double mode = found.first;
  const double top = f(mode);
  if (!std::isfinite(top)) return kNegInf;

  // Distance at which f has dropped by one unit on each side.
  auto drop = [&](double dir) {
    double t = sd;
    while (f(mode + dir * t) > top - 1.0 && t < 1e3 * sd) t *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 30; ++it) {
      const double mid = 0.5 * (lo + t);
      if (mode + dir * mid < 0.0 || f(mode + dir * mid) <= top - 1.0) {
        t = mid;
      } else {
        lo = mid;
      }
    }
    return t;
  };
  const double width = std::max(std::min(drop(1.0), mode > 0.0 ? drop(-1.0) : drop(1.0)), 1e-300);

  std::vector<double> cuts{mode};
  const double reach = 14.0 * sd;
  for (double t = 0.5 * width; t < reach; t *= 2.0) {
    cuts.push_back(mode + t);
    if (mode - t > 0.0) cuts.push_back(mode - t);
  }
  cuts.push_back(mode + reach);
  cuts.push_back(std::max(0.0, mode - reach));
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  using Rule = boost::math::quadrature::gauss<double, 20>;
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    total += Rule::integrate([&](double y) {
      const double v = std::min(f(y) - top, 0.0);
      return v < -745.0 ? 0.0 : std::exp(v);
    }, cuts[k], cuts[k + 1]);
  }
  return top + std::log(total);
}

std::array<std::vector<double>, 3> gk15_rule() {
  // Kronrod abscissae/weights and the embedded Gauss weights (0 where absent).
  using boost::math::quadrature::gauss;
  using boost::math::quadrature::gauss_kronrod;
  const auto &kx = gauss_kronrod<double, 15>::abscissa();
  const auto &kw = gauss_kronrod<double, 15>::weights();
  const auto &gx = gauss<double, 7>::abscissa();
  const auto &gw = gauss<double, 7>::weights();
  std::vector<double> x(kx.begin(), kx.end()), w(kw.begin(), kw.end()), g(kx.size(), 0.0);
  for (std::size_t a = 0; a < gx.size(); ++a)
    for (std::size_t b = 0; b < kx.size(); ++b)
      if (std::abs(gx[a] - kx[b]) < 1e-14) g[b] = gw[a];
  return {x, w, g};
}

// Vector-valued globally adaptive Gauss-Kronrod (7, 15) integration.
class AdaptiveGk {
 public:
  explicit AdaptiveGk(double rel_tol) : rel_tol_(rel_tol), rule_(gk15_rule()) {}

  template <typename F>
  Eigen::VectorXd integrate(const F &f, const std::vector<double> &breaks, Eigen::Index dim) const {
    struct Piece {
      double a, b, err;
      Eigen::VectorXd value;
      bool operator<(const Piece &o) const { return err < o.err; }
    };
    std::priority_queue<Piece> heap;
    Eigen::VectorXd total = Eigen::VectorXd::Zero(dim);
    double total_err = 0.0;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
      Piece p{breaks[k], breaks[k + 1], 0.0, {}};
      rule(f, p.a, p.b, dim, &p.value, &p.err);
      total += p.value;
      total_err += p.err;
      heap.push(std::move(p));
    }
    int splits = 0;
    while (total_err > rel_tol_ * total.cwiseAbs().maxCoeff() + 1e-300 && splits < kMaxSplits) {
      Piece worst = heap.top();
      heap.pop();
      total -= worst.value;
      total_err -= worst.err;
      const double mid = 0.5 * (worst.a + worst.b);
      for (const auto &[a, b] : {std::pair{worst.a, mid}, std::pair{mid, worst.b}}) {
        Piece p{a, b, 0.0, {}};
        rule(f, a, b, dim, &p.value, &p.err);
        total += p.value;
        total_err += p.err;
        heap.push(std::move(p));
      }
      ++splits;
    }
    if (splits >= kMaxSplits) throw NumericError("adaptive Gauss-Kronrod exceeded its subdivision limit");
    return total;
  }

 private:
  static constexpr int kMaxSplits = 400;
  double rel_tol_;
  std::array<std::vector<double>, 3> rule_;

  template <typename F>
  void rule(const F &f, double a, double b, Eigen::Index dim, Eigen::VectorXd *value,
            double *err) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    Eigen::VectorXd kron = Eigen::VectorXd::Zero(dim), gauss = Eigen::VectorXd::Zero(dim);
    const auto &x = rule_[0];
    const auto &wk = rule_[1];
    const auto &wg = rule_[2];
    for (std::size_t i = 0; i < x.size(); ++i) {
      const Eigen::VectorXd fp = f(mid + half * x[i]);
      kron += wk[i] * fp;
      gauss += wg[i] * fp;
      if (x[i] != 0.0) {
        const Eigen::VectorXd fm = f(mid - half * x[i]);
        kron += wk[i] * fm;
        gauss += wg[i] * fm;
      }
    }
    *value = half * kron;
    *err = std::abs(half) * (kron - gauss).cwiseAbs().maxCoeff();
  }
};

struct Quadratic {
  Eigen::MatrixXd a;  // X_S^T X_S / sigma^2
  Eigen::VectorXd b;  // X_S^T Y / sigma^2
  double lambda = 1.0;

  double log_f(const Eigen::VectorXd &theta) const {
    return -0.5 * theta.dot(a * theta) + b.dot(theta) - lambda * theta.lpNorm<1>();
  }
};

Eigen::VectorXd sign_vector(unsigned mask, Eigen::Index k) {
  Eigen::VectorXd s(k);
  for (Eigen::Index j = 0; j < k; ++j) s[j] = (mask >> j) & 1u ? -1.0 : 1.0;
  return s;
}

struct ClosedForm {
  double log_integral = 0.0;  // log int exp(log_f), excluding (lambda/2)^k
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

ClosedForm closed_form(const Quadratic &q) {
  const Eigen::Index k = q.b.size();
  Eigen::LLT<Eigen::MatrixXd> llt(q.a);
  if (llt.info() != Eigen::Success) throw NumericError("oracle: X_S^T X_S is singular");
  const Eigen::MatrixXd c = llt.solve(Eigen::MatrixXd::Identity(k, k));
  const double half_logdet = llt.matrixLLT().diagonal().array().log().sum();

  const unsigned orthants = 1u << k;
  std::vector<double> logw(orthants);
  std::vector<Eigen::VectorXd> means(orthants);
  std::vector<Eigen::MatrixXd> covs(orthants);
  for (unsigned mask = 0; mask < orthants; ++mask) {
    const Eigen::VectorXd s = sign_vector(mask, k);
    const Eigen::VectorXd lin = q.b - q.lambda * s;
    const Eigen::VectorXd m = c * lin;
    // Flip to the positive orthant: Y = D X.
    const Eigen::VectorXd my = s.cwiseProduct(m);
    const Eigen::MatrixXd cy = s.asDiagonal() * c * s.asDiagonal();
    const TruncatedMoments tm = positive_orthant_moments(my, cy);
    logw[mask] = 0.5 * lin.dot(m) + tm.log_prob;
    means[mask] = s.cwiseProduct(tm.mean);
    covs[mask] = s.asDiagonal() * tm.cov * s.asDiagonal();
  }
  ClosedForm out;
  const double lse = log_sum_exp(logw);
  out.log_integral = 0.5 * static_cast<double>(k) * kLog2Pi - half_logdet + lse;
  out.mean = Eigen::VectorXd::Zero(k);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(k, k);
  for (unsigned mask = 0; mask < orthants; ++mask) {
    const double w = std::exp(logw[mask] - lse);
    out.mean += w * means[mask];
    second += w * (covs[mask] + means[mask] * means[mask].transpose());
  }
  out.cov = second - out.mean * out.mean.transpose();
  return out;
}

ClosedForm nested_quadrature(const Quadratic &q) {
  const Eigen::Index k = q.b.size();
  const Eigen::Index dim = 1 + k + k * (k + 1) / 2;
  const Eigen::MatrixXd c = q.a.llt().solve(Eigen::MatrixXd::Identity(k, k));

  // Reference level: best orthant-clipped stationary point.
  double ref = 0.0;
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    const Eigen::VectorXd s = sign_vector(mask, k);
    Eigen::VectorXd m = c * (q.b - q.lambda * s);
    for (Eigen::Index j = 0; j < k; ++j)
      if (m[j] * s[j] < 0.0) m[j] = 0.0;
    ref = std::max(ref, q.log_f(m));
  }

  const AdaptiveGk gk(1e-10);
  Eigen::VectorXd theta(k);
  // Integrate coordinates level..k-1 with theta[0..level) fixed.
  std::function<Eigen::VectorXd(Eigen::Index)> integrate_level = [&](Eigen::Index level) {
    const Eigen::Index r = k - level;
    const Eigen::MatrixXd arr = q.a.bottomRightCorner(r, r);
    Eigen::VectorXd lin = q.b.tail(r);
    if (level > 0) lin -= q.a.block(level, 0, r, level) * theta.head(level);
    const Eigen::MatrixXd crr = arr.llt().solve(Eigen::MatrixXd::Identity(r, r));
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (unsigned mask = 0; mask < (1u << r); ++mask) {
      const double centre = (crr * (lin - q.lambda * sign_vector(mask, r)))[0];
      lo = std::min(lo, centre);
      hi = std::max(hi, centre);
    }
    const double sd = std::sqrt(crr(0, 0));
    lo -= 12.0 * sd;
    hi += 12.0 * sd;
    std::vector<double> breaks{lo};
    if (lo < 0.0 && hi > 0.0) breaks.push_back(0.0);
    breaks.push_back(hi);
    auto f = [&](double t) -> Eigen::VectorXd {
      theta[level] = t;
      if (level + 1 < k) return integrate_level(level + 1);
      const double w = std::exp(q.log_f(theta) - ref);
      Eigen::VectorXd out(dim);
      out[0] = w;
      out.segment(1, k) = w * theta;
      Eigen::Index idx = 1 + k;
      for (Eigen::Index a = 0; a < k; ++a)
        for (Eigen::Index b = a; b < k; ++b) out[idx++] = w * theta[a] * theta[b];
      return out;
    };
    return gk.integrate(f, breaks, dim);
  };
  const Eigen::VectorXd total = integrate_level(0);

  ClosedForm out;
  out.log_integral = ref + std::log(total[0]);
  out.mean = total.segment(1, k) / total[0];
  out.cov.resize(k, k);
  Eigen::Index idx = 1 + k;
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = a; b < k; ++b) {
      out.cov(a, b) = out.cov(b, a) = total[idx++] / total[0] - out.mean[a] * out.mean[b];
    }
  return out;
}

nlohmann::json matrix_json(const Eigen::MatrixXd &m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index a = 0; a < m.rows(); ++a) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index b = 0; b < m.cols(); ++b) row.push_back(m(a, b));
    out.push_back(row);
  }
  return out;
}

}  // namespace

double log_orthant_probability(const Eigen::VectorXd &mean, const Eigen::MatrixXd &cov) {
  const Eigen::Index d = mean.size();
  if (cov.rows() != d || cov.cols() != d) throw ParameterError("orthant: dimension mismatch");
  if (d == 0) return 0.0;
  if (d == 1) return log_ndtr(mean[0] / std::sqrt(cov(0, 0)));
  const double var = cov(0, 0);
  auto f = [&](double y) {
    const Conditional c = condition_on(mean, cov, 0, y);
    return log_normal_pdf(y, mean[0], var) + log_orthant_probability(c.mean, c.cov);
  };
  return log_integral_concave(f, mean[0], std::sqrt(var));
}

TruncatedMoments positive_orthant_moments(const Eigen::VectorXd &mean,
                                          const Eigen::MatrixXd &cov) {
  const Eigen::Index d = mean.size();
  TruncatedMoments out;
  out.log_prob = log_orthant_probability(mean, cov);
  if (d == 0) return out;

  // Boundary terms on each face y_j = 0.
  Eigen::VectorXd a(d);
  std::vector<Eigen::VectorXd> face_means(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) {
    const double log_density = log_normal_pdf(0.0, mean[j], cov(j, j));
    if (d == 1) {
      a[j] = std::exp(log_density - out.log_prob);
      continue;
    }
    const Conditional c = condition_on(mean, cov, j, 0.0);
    const TruncatedMoments face = positive_orthant_moments(c.mean, c.cov);
    a[j] = std::exp(log_density + face.log_prob - out.log_prob);
    face_means[j] = face.mean;
  }
  const Eigen::VectorXd shift = cov * a;
  out.mean = mean + shift;

  Eigen::MatrixXd kmat(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index l = 0, t = 0; l < d; ++l) {
      if (l == j) {
        kmat(j, l) = -a[j] * mean[j];
      } else {
        kmat(j, l) = a[j] * (face_means[j][t++] - mean[l]);
      }
    }
  }
  Eigen::MatrixXd second = cov + cov * kmat;
  second = 0.5 * (second + second.transpose());
  out.cov = second - shift * shift.transpose();
  return out;
}

std::map<Support, double> OracleResult::model_probs() const {
  std::map<Support, double> out;
  for (const auto &m : models)
    if (!m.skipped) out[m.support] = m.prob;
  return out;
}

const ModelPosterior *OracleResult::find(const Support &s) const {
  for (const auto &m : models)
    if (m.support == s) return &m;
  return nullptr;
}

double OracleResult::method_gap() const {
  if (!cross_checked) return std::numeric_limits<double>::quiet_NaN();
  double gap = 0.0;
  for (const auto &m : models) {
    if (m.skipped || m.support.empty() || !std::isfinite(m.log_prior)) continue;
    gap = std::max(gap, std::abs(m.log_evidence - m.quad_log_evidence));
    gap = std::max(gap, (m.mean - m.quad_mean).cwiseAbs().maxCoeff());
    gap = std::max(gap, (m.cov - m.quad_cov).cwiseAbs().maxCoeff());
  }
  return gap;
}

nlohmann::json OracleResult::to_json() const {
  nlohmann::json ms = nlohmann::json::array();
  for (const auto &m : models) {
    nlohmann::json j{{"support", m.support}, {"skipped", m.skipped}};
    if (!m.skipped) {
      j["prob"] = m.prob;
      j["log_evidence"] = m.log_evidence;
      j["log_prior"] = std::isfinite(m.log_prior) ? nlohmann::json(m.log_prior) : nlohmann::json(nullptr);
      j["mean"] = std::vector<double>(m.mean.data(), m.mean.data() + m.mean.size());
      j["cov"] = matrix_json(m.cov);
    }
    ms.push_back(j);
  }
  nlohmann::json out{{"sigma", sigma}, {"complete", complete}, {"models", ms}};
  if (cross_checked) out["method_gap"] = method_gap();
  return out;
}

OracleResult exact_posterior(const Dataset &data, const CoefPriorConfig &prior, double sigma,
                             bool cross_check) {
  const Eigen::Index p = data.p();
  if (p > kOracleMaxP) throw ParameterError("oracle: p must be at most 6");
  if (!(sigma > 0.0)) throw ParameterError("oracle: sigma must be positive");
  if (prior.p != p) throw ParameterError("oracle: prior dimension differs from the data");
  prior.validate();

  const double s2 = sigma * sigma;
  const double n = static_cast<double>(data.n());
  const double base = -n * (std::log(sigma) + 0.5 * kLog2Pi) - 0.5 * data.y.squaredNorm() / s2;

  OracleResult out;
  out.sigma = sigma;
  out.cross_checked = cross_check;
  for (unsigned mask = 0; mask < (1u << p); ++mask) {
    ModelPosterior m;
    for (Eigen::Index j = 0; j < p; ++j)
      if ((mask >> j) & 1u) m.support.push_back(static_cast<int>(j));
    const auto k = static_cast<Eigen::Index>(m.support.size());
    m.log_prior = prior.log_model_prior(k);
    if (k > kOracleMaxModelSize) {
      m.skipped = true;
      out.complete = false;
      out.models.push_back(std::move(m));
      continue;
    }
    if (k == 0) {
      m.log_evidence = m.quad_log_evidence = base;
      out.models.push_back(std::move(m));
      continue;
    }
    Quadratic q;
    const Eigen::MatrixXd xs = data.x.columns(m.support);
    q.a = xs.transpose() * xs / s2;
    q.b = xs.transpose() * data.y / s2;
    q.lambda = prior.lambda;
    const double slab = static_cast<double>(k) * std::log(prior.lambda / 2.0);
    const ClosedForm cf = closed_form(q);
    m.log_evidence = base + slab + cf.log_integral;
    m.mean = cf.mean;
    m.cov = cf.cov;
    if (cross_check) {
      const ClosedForm nq = nested_quadrature(q);
      m.quad_log_evidence = base + slab + nq.log_integral;
      m.quad_mean = nq.mean;
      m.quad_cov = nq.cov;
    }
    out.models.push_back(std::move(m));
  }

  std::vector<double> logpost;
  for (const auto &m : out.models)
    if (!m.skipped) logpost.push_back(m.log_prior + m.log_evidence);
  const double lse = log_sum_exp(logpost);
  for (auto &m : out.models)
    if (!m.skipped) m.prob = std::exp(m.log_prior + m.log_evidence - lse);
  return out;
}

ModelDistribution model_frequencies(const std::vector<ChainSample> &samples) {
  ModelDistribution out;
  if (samples.empty()) return out;
  const double w = 1.0 / static_cast<double>(samples.size());
  for (const auto &s : samples) out[s.support] += w;
  return out;
}

double tv_distance(const ModelDistribution &a, const ModelDistribution &b) {
  double total = 0.0;
  for (const auto &[s, pa] : a) {
    const auto it = b.find(s);
    total += std::abs(pa - (it == b.end() ? 0.0 : it->second));
  }
  for (const auto &[s, pb] : b)
    if (a.find(s) == a.end()) total += pb;
  return 0.5 * total;
}

double compare_to_chain(const OracleResult &oracle, const ChainOutput &chain) {
  return tv_distance(oracle.model_probs(), model_frequencies(chain.samples));
}

}  // namespace semibayes
