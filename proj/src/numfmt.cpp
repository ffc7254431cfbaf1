#include "chaoslab/numfmt.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace chaoslab {

std::string fmt17(double x) { return fmt::format("{:.17g}", x); }

namespace {

double parse_decimal(std::string_view text, std::string_view whole) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(value))
    throw std::invalid_argument(fmt::format("not a number: '{}'", whole));
  return value;
}

}  // namespace

double parse_real(std::string_view text) {
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const double num = parse_decimal(text.substr(0, slash), text);
    const double den = parse_decimal(text.substr(slash + 1), text);
    if (den == 0.0) throw std::invalid_argument(fmt::format("zero denominator: '{}'", text));
    return num / den;
  }
  return parse_decimal(text, text);
}

}  // namespace chaoslab
