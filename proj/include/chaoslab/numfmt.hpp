#pragma once

#include <string>
#include <string_view>

namespace chaoslab {

/// 17 significant digits; parses back to the same double.
std::string fmt17(double x);

/// Decimal ("3.61", "1e-3") or exact fraction ("361/100"). Throws
/// std::invalid_argument on anything else, including trailing garbage.
double parse_real(std::string_view text);

}  // namespace chaoslab
