#include "semibayes/csv.hpp"

#include <charconv>
#include <stdexcept>

namespace semibayes {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv_line(std::string_view line, char sep) {
  std::vector<std::string> out;
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string join_ints(const std::vector<int> &v, char sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(v[i]);
  }
  return out;
}

std::string join_doubles(const std::vector<double> &v, char sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += format_double(v[i]);
  }
  return out;
}

std::vector<int> parse_ints(std::string_view s, char sep) {
  std::vector<int> out;
  if (s.empty()) return out;
  for (const auto &cell : split_csv_line(s, sep)) out.push_back(std::stoi(cell));
  return out;
}

std::vector<double> parse_doubles(std::string_view s, char sep) {
  std::vector<double> out;
  if (s.empty()) return out;
  for (const auto &cell : split_csv_line(s, sep)) out.push_back(std::stod(cell));
  return out;
}

}  // namespace semibayes
