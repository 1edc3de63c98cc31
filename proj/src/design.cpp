#include "semibayes/design.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "semibayes/csv.hpp"

namespace semibayes {

DesignMatrix::DesignMatrix(Eigen::MatrixXd entries) : x_(std::move(entries)) {
  if (x_.rows() < 1 || x_.cols() < 1)
    throw ParameterError("design matrix needs n >= 1 and p >= 1");
  if (!x_.allFinite()) throw ParameterError("design matrix has non-finite entries");
  gram_ = Eigen::MatrixXd::Zero(x_.cols(), x_.cols());
  gram_.selfadjointView<Eigen::Lower>().rankUpdate(x_.transpose(),
                                                   1.0 / static_cast<double>(x_.rows()));
  gram_.triangularView<Eigen::StrictlyUpper>() = gram_.transpose();
}

Eigen::MatrixXd DesignMatrix::gram_block(const Support &s) const {
  return detail::principal_block(gram_, s);
}

Eigen::MatrixXd DesignMatrix::columns(const Support &s) const {
  Eigen::MatrixXd out(n(), static_cast<Eigen::Index>(s.size()));
  for (std::size_t j = 0; j < s.size(); ++j) out.col(j) = x_.col(s[j]);
  return out;
}

DesignMatrix gen_design(Eigen::Index n, Eigen::Index p, const DesignSpec &spec,
                        std::uint64_t seed) {
  if (n < 1 || p < 1) throw ParameterError("gen_design: n and p must be positive");
  Rng rng(seed);
  switch (spec.kind) {
    case DesignKind::kIidGaussian: {
      Eigen::MatrixXd x(n, p);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j) x(i, j) = std_normal(rng);
      return DesignMatrix(std::move(x));
    }
    case DesignKind::kEquicorrelated: {
      const double rho = spec.rho;
      const double lower = p > 1 ? -1.0 / static_cast<double>(p - 1) : -1.0;
      if (!(rho > lower && rho < 1.0))
        throw ParameterError("gen_design: equicorrelation must satisfy -1/(p-1) < rho < 1");
      // Rows x_i = sqrt(1-rho) u_i + sqrt(rho) v_i 1 for rho >= 0; general rho
      // through the Cholesky factor of the equicorrelation matrix.
      Eigen::MatrixXd r = Eigen::MatrixXd::Constant(p, p, rho);
      r.diagonal().setOnes();
      const Eigen::LLT<Eigen::MatrixXd> llt(r);
      Eigen::MatrixXd z(n, p);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j) z(i, j) = std_normal(rng);
      return DesignMatrix(z * llt.matrixU());
    }
    case DesignKind::kIdentityBlock: {
      if (n < p) throw ParameterError("gen_design: identity_block needs n >= p");
      Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, p);
      x.topRows(p).diagonal().setConstant(std::sqrt(static_cast<double>(n)));
      return DesignMatrix(std::move(x));
    }
  }
  throw ParameterError("gen_design: unknown design kind");
}

double entry_bound_constant(const DesignMatrix &x) {
  if (x.p() < 2) throw ParameterError("entry_bound_constant needs p >= 2");
  return x.x().cwiseAbs().maxCoeff() / std::sqrt(std::log(static_cast<double>(x.p())));
}

double supports_up_to(Eigen::Index p, int s) {
  double total = 0.0;
  double binom = 1.0;
  for (int k = 1; k <= s; ++k) {
    binom = binom * static_cast<double>(p - k + 1) / static_cast<double>(k);
    total += binom;
  }
  return total;
}

RegularityReport regularity(const DesignMatrix &x, int s) {
  RegularityReport r;
  r.s = s;
  r.psi = restricted_eigenvalue(x.gram(), s, &r.argmin_support);
  r.phi = compatibility(x.gram(), s, &r.phi_argmin_support);
  return r;
}

RegularityReport regularity_sampled(const DesignMatrix &x, int s, int draws,
                                    std::uint64_t seed) {
  if (s < 1 || s > x.p()) throw ParameterError("sparsity level must satisfy 1 <= s <= p");
  RegularityReport r;
  r.s = s;
  r.exact = false;
  r.phi = std::numeric_limits<double>::infinity();
  r.psi = std::numeric_limits<double>::infinity();
  Rng rng(seed);
  std::vector<int> pool(x.p());
  std::iota(pool.begin(), pool.end(), 0);
  for (int d = 0; d < draws; ++d) {
    // Partial Fisher-Yates for a uniform s-subset.
    for (int k = 0; k < s; ++k) {
      const auto j = k + static_cast<int>(uniform01(rng) * static_cast<double>(x.p() - k));
      std::swap(pool[k], pool[std::min<int>(j, static_cast<int>(x.p()) - 1)]);
    }
    Support idx(pool.begin(), pool.begin() + s);
    std::sort(idx.begin(), idx.end());
    const Eigen::MatrixXd block = x.gram_block(idx);
    Support local;
    const double psi = restricted_eigenvalue(block, s, &local);
    if (psi < r.psi) {
      r.psi = psi;
      r.argmin_support = idx;
    }
    const double phi = compatibility(block, s, &local);
    if (phi < r.phi) {
      r.phi = phi;
      r.phi_argmin_support.clear();
      for (int j : local) r.phi_argmin_support.push_back(idx[j]);
    }
  }
  return r;
}

void write_design_csv(const DesignMatrix &x, const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out) throw ParameterError("cannot write " + path.string());
  out << x.n() << ',' << x.p() << '\n';
  for (Eigen::Index i = 0; i < x.n(); ++i) {
    for (Eigen::Index j = 0; j < x.p(); ++j) {
      if (j) out << ',';
      out << format_double(x.x()(i, j));
    }
    out << '\n';
  }
}

DesignMatrix read_design_csv(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  const auto header = split_csv_line(line);
  if (header.size() != 2) throw ParameterError("design file header must be 'n,p'");
  const long n = std::stol(header[0]);
  const long p = std::stol(header[1]);
  if (n < 1 || p < 1) throw ParameterError("design file has nonpositive dimensions");
  Eigen::MatrixXd x(n, p);
  for (long i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw ParameterError("design file truncated");
    const auto cells = split_csv_line(line);
    if (static_cast<long>(cells.size()) != p)
      throw ParameterError("design row " + std::to_string(i) + " has wrong width");
    for (long j = 0; j < p; ++j) x(i, j) = std::stod(cells[j]);
  }
  return DesignMatrix(std::move(x));
}

}  // namespace semibayes
