#include "jinv/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace jinv::csv {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r')
        fields.back().pop_back();
    return fields;
}

std::string format_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    // %.17g round-trips doubles exactly; trim to %.12g when that already does
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    if (std::strtod(buf, nullptr) == v) return buf;
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_number(const std::string& field) {
    if (field == "inf") return std::numeric_limits<double>::infinity();
    if (field == "-inf") return -std::numeric_limits<double>::infinity();
    if (field == "nan") return std::numeric_limits<double>::quiet_NaN();
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(field, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("csv: bad number '" + field + "'");
    }
    if (pos != field.size()) throw std::invalid_argument("csv: trailing junk in '" + field + "'");
    return v;
}

} // namespace jinv::csv
