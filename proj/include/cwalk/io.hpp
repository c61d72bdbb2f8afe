#pragma once

#include <string>

namespace cwalk::io {

/// Locale-independent shortest-roundtrip-free decimal with `digits`
/// significant digits (default 17).
std::string format_double(double v, int digits = 17);

/// Parses a decimal number independent of the C locale. Throws
/// std::invalid_argument on trailing garbage.
double parse_double(const std::string& s);

inline constexpr const char* kVersion = "cwalk 1.0.0";

}  // namespace cwalk::io
