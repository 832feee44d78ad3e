// format.hpp — Locale-independent number formatting helpers

#pragma once

#include <string>

namespace dicke {

// Shortest decimal string that parses back to exactly the same double.
// Unlike iostream/printf this never consults the global locale, so output
// files are byte-identical across environments.
std::string format_double(double v);

// Fixed-point with `digits` fractional digits, also locale-independent.
std::string format_fixed(double v, int digits);

} // namespace dicke
