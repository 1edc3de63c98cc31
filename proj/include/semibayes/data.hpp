#ifndef SEMIBAYES_DATA_HPP_
#define SEMIBAYES_DATA_HPP_

#include <cstdint>
#include <filesystem>

#include <Eigen/Dense>

#include "semibayes/design.hpp"

namespace semibayes {

/// Observed regression data Y = X theta + eps.
struct Dataset {
  DesignMatrix x;
  Eigen::VectorXd y;

  Eigen::Index n() const { return x.n(); }
  Eigen::Index p() const { return x.p(); }
  /// FNV-1a over the raw bytes of y and X.
  std::uint64_t hash() const;
};

// Dataset CSV: header "n,p" then n rows "y,x_1,...,x_p".
void write_dataset_csv(const Dataset &data, const std::filesystem::path &path);
Dataset read_dataset_csv(const std::filesystem::path &path);

}  // namespace semibayes

#endif  // SEMIBAYES_DATA_HPP_
