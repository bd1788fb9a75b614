#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace sascor::detail {

// Shortest decimal representation that round-trips to the same double.
// Used by every writer so that identical runs produce identical bytes.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace sascor::detail
