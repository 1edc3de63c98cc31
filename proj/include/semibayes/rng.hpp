#ifndef SEMIBAYES_RNG_HPP_
#define SEMIBAYES_RNG_HPP_

#include <cstdint>
#include <random>
#include <string_view>

#include <Eigen/Dense>

namespace semibayes {

using Rng = std::mt19937_64;

// Counter-based seed derivation: every random stream in the project is named by
// (master seed, cell index, stream id) and mixed through splitmix64.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t cell,
                          std::uint64_t stream);
std::uint64_t stream_id(std::string_view name);
Rng make_rng(std::uint64_t master, std::uint64_t cell, std::string_view stream);

double uniform01(Rng &rng);  // open interval (0, 1)
double std_normal(Rng &rng);
double gamma_shape_rate(Rng &rng, double shape, double rate);
double beta(Rng &rng, double a, double b);

/// X with X^{-1} ~ Gamma(shape, rate), i.e. inverse-gamma with scale `scale`.
double inverse_gamma(Rng &rng, double shape, double scale);

/// Inverse-Gaussian (Wald) draw with mean `mu` and shape `shape`.
double inverse_gaussian(Rng &rng, double mu, double shape);

/// Normal(mean, sd^2) restricted to [lo, hi]. Exact inversion in the tail that
/// carries less mass so both deep-tail and wide intervals stay accurate.
double truncated_normal(Rng &rng, double mean, double sd, double lo, double hi);

/// Gamma(shape, rate) restricted to [lo, hi] by inversion of the regularized
/// incomplete gamma function.
double truncated_gamma(Rng &rng, double shape, double rate, double lo,
                       double hi);

/// Index drawn with probabilities proportional to exp(log_weights).
Eigen::Index categorical_from_log(Rng &rng,
                                  const Eigen::Ref<const Eigen::ArrayXd> &log_weights);

}  // namespace semibayes

#endif  // SEMIBAYES_RNG_HPP_
