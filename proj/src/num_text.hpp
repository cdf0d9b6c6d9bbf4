#pragma once

#include <charconv>
#include <cmath>
#include <limits>
#include <string>
#include <system_error>

#include "xlayer/core_model.hpp"

namespace xlayer {

// Shortest round-trip decimal form; integral values lose the trailing ".0".
inline std::string format_double(double v) {
  if (std::isnan(v)) throw Error("cannot format NaN");
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
  if (s == "+inf" || s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ParseError("not a number: " + s);
  return v;
}

}  // namespace xlayer
