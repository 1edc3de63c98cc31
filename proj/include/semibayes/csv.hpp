#ifndef SEMIBAYES_CSV_HPP_
#define SEMIBAYES_CSV_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace semibayes {

// Shortest round-trip decimal form, locale independent.
std::string format_double(double v);
std::vector<std::string> split_csv_line(std::string_view line, char sep = ',');
std::string join_ints(const std::vector<int> &v, char sep = ';');
std::string join_doubles(const std::vector<double> &v, char sep = ';');
std::vector<int> parse_ints(std::string_view s, char sep = ';');
std::vector<double> parse_doubles(std::string_view s, char sep = ';');

}  // namespace semibayes

#endif  // SEMIBAYES_CSV_HPP_
