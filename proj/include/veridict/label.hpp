#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "veridict/error.hpp"

namespace veridict {

/// Article class. The integer encoding is fixed: FAKE = 0, REAL = 1.
enum class Label : int { Fake = 0, Real = 1 };

inline constexpr int encode(Label label) noexcept { return static_cast<int>(label); }

inline Label decode(int value) {
  if (value == 0) return Label::Fake;
  if (value == 1) return Label::Real;
  throw Error(ErrorKind::InvalidConfig, "label code must be 0 or 1, got " + std::to_string(value));
}

inline constexpr std::string_view to_string(Label label) noexcept {
  return label == Label::Real ? "REAL" : "FAKE";
}

/// Case-insensitive, whitespace-trimmed; nullopt for anything but fake/real.
inline std::optional<Label> parse_label(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return std::nullopt;
  s = s.substr(first, s.find_last_not_of(ws) - first + 1);
  if (s.size() != 4) return std::nullopt;
  std::string lower(s);
  for (char& c : lower) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  if (lower == "real") return Label::Real;
  if (lower == "fake") return Label::Fake;
  return std::nullopt;
}

}  // namespace veridict
