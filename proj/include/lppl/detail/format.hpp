#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace lppl::detail {

inline constexpr int significant_digits = 12;

/// Fixed 12-significant-digit rendering used by every CSV and JSON writer.
inline std::string format_number(double value) {
    if (!std::isfinite(value)) {
        return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", significant_digits, value);
    std::string out(buf);
    if (out == "-0") out = "0";
    return out;
}

/// Rounds to the value that format_number prints, so JSON emitters stay at 12 digits.
inline double round_significant(double value) {
    if (!std::isfinite(value)) return value;
    return std::strtod(format_number(value).c_str(), nullptr);
}

} // namespace lppl::detail
