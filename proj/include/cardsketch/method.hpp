#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace cardsketch {

enum class Method { freebs, freers, cse, vhll, lpc, hll };

inline constexpr std::array<Method, 6> kAllMethods = {
    Method::freebs, Method::freers, Method::cse, Method::vhll, Method::lpc, Method::hll};

inline std::string_view method_name(Method m) {
  switch (m) {
    case Method::freebs: return "FreeBS";
    case Method::freers: return "FreeRS";
    case Method::cse: return "CSE";
    case Method::vhll: return "vHLL";
    case Method::lpc: return "LPC";
    case Method::hll: return "HLL";
  }
  return "?";
}

inline std::optional<Method> parse_method(std::string_view s) {
  auto eq = [](std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const char ca = a[i] >= 'A' && a[i] <= 'Z' ? char(a[i] - 'A' + 'a') : a[i];
      const char cb = b[i] >= 'A' && b[i] <= 'Z' ? char(b[i] - 'A' + 'a') : b[i];
      if (ca != cb) return false;
    }
    return true;
  };
  for (Method m : kAllMethods) {
    if (eq(s, method_name(m))) return m;
  }
  return std::nullopt;
}

}  // namespace cardsketch
