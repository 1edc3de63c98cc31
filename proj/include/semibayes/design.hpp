#ifndef SEMIBAYES_DESIGN_HPP_
#define SEMIBAYES_DESIGN_HPP_

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "semibayes/errors.hpp"
#include "semibayes/rng.hpp"

namespace semibayes {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Support = std::vector<int>;  // sorted, unique, 0-based column indices

/// Fixed n x p covariate matrix with its Gram matrix X^T X / n cached at
/// construction. Immutable; safe to share across threads.
class DesignMatrix {
 public:
  DesignMatrix() = default;
  explicit DesignMatrix(Eigen::MatrixXd entries);

  Eigen::Index n() const { return x_.rows(); }
  Eigen::Index p() const { return x_.cols(); }
  const Eigen::MatrixXd &x() const { return x_; }
  const Eigen::MatrixXd &gram() const { return gram_; }

  Eigen::MatrixXd gram_block(const Support &s) const;
  Eigen::MatrixXd columns(const Support &s) const;

 private:
  Eigen::MatrixXd x_;
  Eigen::MatrixXd gram_;
};

enum class DesignKind { kIidGaussian, kEquicorrelated, kIdentityBlock };

struct DesignSpec {
  DesignKind kind = DesignKind::kIidGaussian;
  double rho = 0.0;  // equicorrelated only
};

DesignMatrix gen_design(Eigen::Index n, Eigen::Index p, const DesignSpec &spec,
                        std::uint64_t seed);

/// max |x_ij| / sqrt(log p).
double entry_bound_constant(const DesignMatrix &x);

struct RegularityReport {
  int s = 0;
  double phi = 0.0;
  double psi = 0.0;
  Support argmin_support;      // attains psi
  Support phi_argmin_support;  // attains phi
  bool exact = true;           // false when produced by support sampling
};

inline constexpr double kMaxEnumeratedSupports = 1e6;

/// Sum_{k <= s} C(p, k), in floating point to avoid overflow.
double supports_up_to(Eigen::Index p, int s);

namespace detail {

template <typename F>
void for_each_subset(int p, int k, F &&visit) {
  if (k == 0 || k > p) return;
  Support idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    visit(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == p - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

template <typename Derived>
Matrix<typename Derived::Scalar> principal_block(
    const Eigen::MatrixBase<Derived> &g, const Support &s) {
  const auto k = static_cast<Eigen::Index>(s.size());
  Matrix<typename Derived::Scalar> out(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) out(a, b) = g(s[a], s[b]);
  return out;
}

inline void guard_enumeration(Eigen::Index p, int s) {
  if (s < 1 || s > p) throw ParameterError("sparsity level must satisfy 1 <= s <= p");
  if (supports_up_to(p, s) > kMaxEnumeratedSupports)
    throw CapacityError(
        "exact enumeration exceeds 1e6 supports; use regularity_sampled "
        "(an upper estimate)");
}

}  // namespace detail

/// psi(s): smallest sqrt(lambda_min(Sigma_S)) over |S| <= s. By eigenvalue
/// interlacing the minimum is attained at |S| = s, so only those are visited.
template <typename Derived>
double restricted_eigenvalue(const Eigen::MatrixBase<Derived> &gram, int s,
                             Support *argmin = nullptr) {
  using Scalar = typename Derived::Scalar;
  const auto p = static_cast<int>(gram.rows());
  detail::guard_enumeration(p, s);
  Scalar best = std::numeric_limits<Scalar>::infinity();
  detail::for_each_subset(p, s, [&](const Support &idx) {
    const auto block = detail::principal_block(gram, idx);
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(block,
                                                      Eigen::EigenvaluesOnly);
    const Scalar lmin = eig.eigenvalues()(0);
    if (lmin < best) {
      best = lmin;
      if (argmin) *argmin = idx;
    }
  });
  using std::max;
  using std::sqrt;
  return static_cast<double>(sqrt(max(best, Scalar(0))));
}

/// phi(s): min over supports S (|S| <= s) and sign patterns sigma of
/// |S| / (sigma^T Sigma_S^{-1} sigma), keeping only sign patterns reproduced by
/// the minimizer Sigma_S^{-1} sigma. Singular Sigma_S yields 0.
template <typename Derived>
double compatibility(const Eigen::MatrixBase<Derived> &gram, int s,
                     Support *argmin = nullptr) {
  using Scalar = typename Derived::Scalar;
  const auto p = static_cast<int>(gram.rows());
  detail::guard_enumeration(p, s);
  Scalar best = std::numeric_limits<Scalar>::infinity();
  for (int k = 1; k <= s; ++k) {
    detail::for_each_subset(p, k, [&](const Support &idx) {
      const auto block = detail::principal_block(gram, idx);
      Eigen::LDLT<Matrix<Scalar>> ldlt(block);
      Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(block,
                                                        Eigen::EigenvaluesOnly);
      const Scalar scale = block.diagonal().cwiseAbs().maxCoeff();
      if (eig.eigenvalues()(0) <= Scalar(1e-12) * (scale > 0 ? scale : Scalar(1))) {
        if (Scalar(0) < best) {
          best = Scalar(0);
          if (argmin) *argmin = idx;
        }
        return;
      }
      // First sign fixed to +1: sigma and -sigma give the same value.
      const unsigned patterns = 1u << (k - 1);
      Vector<Scalar> sigma(k);
      for (unsigned mask = 0; mask < patterns; ++mask) {
        sigma(0) = Scalar(1);
        for (int j = 1; j < k; ++j) sigma(j) = (mask >> (j - 1)) & 1u ? Scalar(-1) : Scalar(1);
        const Vector<Scalar> u = ldlt.solve(sigma);
        bool same_orthant = true;
        for (int j = 0; j < k; ++j)
          if (!(u(j) * sigma(j) > Scalar(0))) same_orthant = false;
        if (!same_orthant) continue;
        const Scalar value = Scalar(k) / sigma.dot(u);
        if (value < best) {
          best = value;
          if (argmin) *argmin = idx;
        }
      }
    });
  }
  using std::max;
  using std::sqrt;
  return static_cast<double>(sqrt(max(best, Scalar(0))));
}

RegularityReport regularity(const DesignMatrix &x, int s);

/// Randomized fallback for large p: minimum over `draws` uniformly sampled
/// supports of size s. The sampled minimum can only overestimate phi and psi.
RegularityReport regularity_sampled(const DesignMatrix &x, int s, int draws,
                                    std::uint64_t seed);

// Design CSV: header line "n,p" then n rows of p comma-separated values.
void write_design_csv(const DesignMatrix &x, const std::filesystem::path &path);
DesignMatrix read_design_csv(const std::filesystem::path &path);

}  // namespace semibayes

#endif  // SEMIBAYES_DESIGN_HPP_
