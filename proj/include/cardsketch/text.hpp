#pragma once

#include <cstdio>
#include <string>

namespace cardsketch {

// Shortest round-trippable decimal form; locale-free and stable across runs.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace cardsketch
