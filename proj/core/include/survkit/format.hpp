#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace survkit {

/// Shortest decimal string that round-trips the double exactly. NaN prints as
/// "nan", infinities as "inf"/"-inf"; integral values carry no trailing ".0".
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string format_number(std::size_t v) { return std::to_string(v); }

} // namespace survkit
