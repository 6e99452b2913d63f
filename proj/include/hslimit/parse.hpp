#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "hslimit/error.hpp"

namespace hslimit {

/// Whole-string decimal parse; trailing garbage is an error.
inline double parse_real(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
    text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t'))
    text.remove_suffix(1);
  double value = 0.0;
  const auto *end = text.data() + text.size();
  if (!text.empty() && text.front() == '+')
    text.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end)
    throw ConfigError("not a number: '" + std::string(text) + "'");
  return value;
}

inline std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = text.substr(start, comma == std::string_view::npos
                                              ? std::string_view::npos
                                              : comma - start);
    out.push_back(parse_real(piece));
    if (comma == std::string_view::npos)
      break;
    start = comma + 1;
  }
  return out;
}

} // namespace hslimit
