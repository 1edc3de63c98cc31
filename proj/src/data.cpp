#include "semibayes/data.hpp"

#include <cstring>
#include <fstream>
#include <string>

#include "semibayes/csv.hpp"
#include "semibayes/errors.hpp"

namespace semibayes {

namespace {

void fnv_bytes(std::uint64_t &h, const void *data, std::size_t len) {
  const auto *bytes = static_cast<const unsigned char *>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
}

}  // namespace

std::uint64_t Dataset::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const std::int64_t dims[2] = {static_cast<std::int64_t>(n()), static_cast<std::int64_t>(p())};
  fnv_bytes(h, dims, sizeof(dims));
  fnv_bytes(h, y.data(), sizeof(double) * static_cast<std::size_t>(y.size()));
  fnv_bytes(h, x.x().data(), sizeof(double) * static_cast<std::size_t>(x.x().size()));
  return h;
}

void write_dataset_csv(const Dataset &data, const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out) throw ParameterError("cannot write " + path.string());
  out << data.n() << ',' << data.p() << '\n';
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    out << format_double(data.y[i]);
    for (Eigen::Index j = 0; j < data.p(); ++j) out << ',' << format_double(data.x.x()(i, j));
    out << '\n';
  }
}

Dataset read_dataset_csv(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  const auto header = split_csv_line(line);
  if (header.size() != 2) throw ParameterError("dataset header must be 'n,p'");
  const long n = std::stol(header[0]);
  const long p = std::stol(header[1]);
  if (n < 1 || p < 1) throw ParameterError("dataset has nonpositive dimensions");
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n);
  for (long i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw ParameterError("dataset truncated");
    const auto cells = split_csv_line(line);
    if (static_cast<long>(cells.size()) != p + 1)
      throw ParameterError("dataset row " + std::to_string(i) + " has wrong width");
    y[i] = std::stod(cells[0]);
    for (long j = 0; j < p; ++j) x(i, j) = std::stod(cells[j + 1]);
  }
  return Dataset{DesignMatrix(std::move(x)), std::move(y)};
}

}  // namespace semibayes
