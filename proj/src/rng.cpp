#include "semibayes/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace semibayes {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t cell,
                          std::uint64_t stream) {
  return splitmix64(splitmix64(splitmix64(master) ^ cell) ^ stream);
}

std::uint64_t stream_id(std::string_view name) {
  // FNV-1a
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Rng make_rng(std::uint64_t master, std::uint64_t cell, std::string_view stream) {
  return Rng(derive_seed(master, cell, stream_id(stream)));
}

double uniform01(Rng &rng) {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double std_normal(Rng &rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

double gamma_shape_rate(Rng &rng, double shape, double rate) {
  std::gamma_distribution<double> dist(shape, 1.0 / rate);
  return dist(rng);
}

double beta(Rng &rng, double a, double b) {
  const double x = gamma_shape_rate(rng, a, 1.0);
  const double y = gamma_shape_rate(rng, b, 1.0);
  if (x + y == 0.0) return a / (a + b);
  return x / (x + y);
}

double inverse_gamma(Rng &rng, double shape, double scale) {
  return 1.0 / gamma_shape_rate(rng, shape, scale);
}

double inverse_gaussian(Rng &rng, double mu, double shape) {
  // Michael, Schucany & Haas (1976).
  const double nu = std_normal(rng);
  const double y = nu * nu;
  const double x = mu + mu * mu * y / (2.0 * shape) -
                   mu / (2.0 * shape) *
                       std::sqrt(4.0 * mu * shape * y + mu * mu * y * y);
  if (uniform01(rng) <= mu / (mu + x)) return x;
  return mu * mu / x;
}

namespace {

double norm_cdf(double z) { return 0.5 * boost::math::erfc(-z / std::sqrt(2.0)); }

double norm_quantile(double p) {
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

}  // namespace

double truncated_normal(Rng &rng, double mean, double sd, double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("truncated_normal: empty interval");
  if (sd <= 0.0) return std::clamp(mean, lo, hi);
  const double a = (lo - mean) / sd;
  const double b = (hi - mean) / sd;
  const double u = uniform01(rng);
  double z;
  if (a >= 0.0) {
    // Both bounds in the upper tail: invert the survival function.
    const double qa = norm_cdf(-a);
    const double qb = norm_cdf(-b);
    z = -norm_quantile(qa - u * (qa - qb));
  } else if (b <= 0.0) {
    const double pa = norm_cdf(a);
    const double pb = norm_cdf(b);
    z = norm_quantile(pa + u * (pb - pa));
  } else {
    const double pa = norm_cdf(a);
    const double pb = norm_cdf(b);
    const double p = pa + u * (pb - pa);
    z = p < 0.5 ? norm_quantile(p) : -norm_quantile(1.0 - p);
  }
  if (!std::isfinite(z)) z = std::isinf(a) ? b : a;
  return std::clamp(mean + sd * z, lo, hi);
}

double truncated_gamma(Rng &rng, double shape, double rate, double lo,
                       double hi) {
  if (!(lo <= hi) || lo < 0.0)
    throw std::invalid_argument("truncated_gamma: invalid interval");
  const double plo = lo <= 0.0 ? 0.0 : boost::math::gamma_p(shape, lo * rate);
  const double phi =
      std::isinf(hi) ? 1.0 : boost::math::gamma_p(shape, hi * rate);
  if (plo == 0.0 && phi == 1.0) return gamma_shape_rate(rng, shape, rate);
  const double u = uniform01(rng);
  double x;
  if (plo > 0.5) {
    // Work with upper tails for accuracy.
    const double qlo = boost::math::gamma_q(shape, lo * rate);
    const double qhi = std::isinf(hi) ? 0.0 : boost::math::gamma_q(shape, hi * rate);
    x = boost::math::gamma_q_inv(shape, qlo - u * (qlo - qhi)) / rate;
  } else {
    x = boost::math::gamma_p_inv(shape, plo + u * (phi - plo)) / rate;
  }
  return std::clamp(x, lo, hi);
}

Eigen::Index categorical_from_log(Rng &rng,
                                  const Eigen::Ref<const Eigen::ArrayXd> &log_weights) {
  const double shift = log_weights.maxCoeff();
  const Eigen::ArrayXd w = (log_weights - shift).exp();
  const double total = w.sum();
  double u = uniform01(rng) * total;
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    u -= w[k];
    if (u <= 0.0) return k;
  }
  // Rounding: return the last index with positive weight.
  for (Eigen::Index k = w.size() - 1; k >= 0; --k)
    if (w[k] > 0.0) return k;
  return w.size() - 1;
}

}  // namespace semibayes
