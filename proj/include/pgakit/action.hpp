#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace pgakit {

using Nat = std::uint64_t;

/// A basic action `method`, `method:n`, `focus.method` or `focus.method:n`.
/// Equality is structural on all three fields.
struct Action {
  std::optional<std::string> focus;
  std::string method;
  std::optional<Nat> argument;

  friend auto operator<=>(const Action&, const Action&) = default;
  friend bool operator==(const Action&, const Action&) = default;
};

Action make_action(std::string_view method);
Action make_action(std::string_view focus, std::string_view method,
                   std::optional<Nat> argument = std::nullopt);

/// Lowercase alphanumeric-with-underscore, starting with a letter.
bool is_identifier(std::string_view text);

/// An identifier optionally followed by `:NAT` (e.g. `rlc:5`).
bool is_focus(std::string_view text);

bool is_valid(const Action& action);

std::string to_string(const Action& action);

/// Parses a complete action string; throws ParseError on malformed input.
Action parse_action(std::string_view text);

}  // namespace pgakit
