#pragma once

#include <charconv>
#include <string>

namespace bridgecast {

// Shortest round-trip decimal form; identical doubles print identically.
inline void append_double(std::string& out, double v) {
  char buf[40];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  out.append(buf, p);
}

inline std::string format_double(double v) {
  std::string s;
  append_double(s, v);
  return s;
}

}  // namespace bridgecast
