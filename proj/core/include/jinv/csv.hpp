#ifndef JINV_CSV_HPP
#define JINV_CSV_HPP

#include <string>
#include <vector>

namespace jinv::csv {

/// Split a CSV line on commas. No quoting: the formats written here never
/// contain commas inside fields.
std::vector<std::string> split_line(const std::string& line);

/// Shortest round-trip-stable decimal form; "inf"/"-inf" for infinities.
std::string format_number(double v);
double parse_number(const std::string& field);

} // namespace jinv::csv

#endif
