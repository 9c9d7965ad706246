#include "qgnls/format.hpp"

#include <charconv>
#include <cmath>

namespace qgnls {

std::string fmt_num(double x) {
    if (x == 0.0) return "0";  // folds -0
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 12);
    return std::string(buf, ptr);
}

}  // namespace qgnls
