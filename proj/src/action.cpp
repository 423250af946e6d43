#include "pgakit/action.hpp"

#include <cctype>

#include "text_cursor.hpp"

namespace pgakit {

Action make_action(std::string_view method) { return Action{std::nullopt, std::string(method), std::nullopt}; }

Action make_action(std::string_view focus, std::string_view method, std::optional<Nat> argument) {
  return Action{std::string(focus), std::string(method), argument};
}

bool is_identifier(std::string_view text) {
  if (text.empty() || !std::islower(static_cast<unsigned char>(text.front()))) return false;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (!(std::islower(c) || std::isdigit(c) || c == '_')) return false;
  }
  return true;
}

bool is_focus(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) return is_identifier(text);
  const auto digits = text.substr(colon + 1);
  if (digits.empty()) return false;
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return is_identifier(text.substr(0, colon));
}

bool is_valid(const Action& action) {
  if (!is_identifier(action.method)) return false;
  return !action.focus || is_focus(*action.focus);
}

std::string to_string(const Action& action) {
  std::string out;
  if (action.focus) out = *action.focus + ".";
  out += action.method;
  if (action.argument) out += ":" + std::to_string(*action.argument);
  return out;
}

Action parse_action(std::string_view text) {
  detail::TextCursor cursor(text);
  Action action = cursor.action();
  if (!cursor.at_end()) cursor.fail("unexpected trailing input after action");
  return action;
}

}  // namespace pgakit
