#pragma once

#include <string>

namespace qgnls {

/// Locale-independent shortest form with 12 significant digits.
[[nodiscard]] std::string fmt_num(double x);

}  // namespace qgnls
