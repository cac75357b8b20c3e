#pragma once
// Text parsing and formatting helpers for the cache and coefficient files.

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "modsym/errors.hpp"
#include "modsym/halfplane.hpp"

namespace modsym {

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) parts.push_back(cur);
  return parts;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline i64 parse_int(const std::string& s) {
  std::size_t pos = 0;
  i64 v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw FormatError("not an integer: '" + s + "'");
  }
  if (pos != s.size()) throw FormatError("not an integer: '" + s + "'");
  return v;
}

inline double parse_real(const std::string& s) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw FormatError("not a number: '" + s + "'");
  }
  if (pos != s.size()) throw FormatError("not a number: '" + s + "'");
  return v;
}

}  // namespace detail

}  // namespace modsym
