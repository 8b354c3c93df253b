#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace orlicz {

// Shortest decimal text that parses back to exactly the same double.
inline std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

// Fixed 17-significant-digit rendering used for every tabular output.
inline std::string format_17g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace orlicz
