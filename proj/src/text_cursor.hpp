#pragma once

#include <cctype>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "pgakit/action.hpp"
#include "pgakit/errors.hpp"

namespace pgakit::detail {

// Whitespace-insensitive scanner shared by the program, spec and binding
// grammars. Line/column are computed lazily, only when an error is raised.
class TextCursor {
 public:
  explicit TextCursor(std::string_view text, std::size_t first_line = 1)
      : text_(text), first_line_(first_line) {}

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool starts_with(std::string_view token) {
    skip_space();
    return text_.substr(pos_).starts_with(token);
  }

  bool consume(std::string_view token) {
    if (!starts_with(token)) return false;
    pos_ += token.size();
    return true;
  }

  void expect(std::string_view token) {
    if (!consume(token)) fail("expected '" + std::string(token) + "'");
  }

  std::optional<Nat> nat() {
    skip_space();
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      return std::nullopt;
    }
    Nat value = 0;
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      const Nat digit = static_cast<Nat>(text_[pos_] - '0');
      if (value > (std::numeric_limits<Nat>::max() - digit) / 10) {
        pos_ = start;
        fail("number out of range");
      }
      value = value * 10 + digit;
      ++pos_;
    }
    return value;
  }

  Nat expect_nat() {
    if (auto value = nat()) return *value;
    fail("expected a natural number");
  }

  std::optional<std::string> identifier() {
    skip_space();
    if (pos_ >= text_.size() || !std::islower(static_cast<unsigned char>(text_[pos_]))) {
      return std::nullopt;
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size()) {
      const auto c = static_cast<unsigned char>(text_[pos_]);
      if (!(std::islower(c) || std::isdigit(c) || c == '_')) break;
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  // IDENT (':' NAT)? ('.' IDENT (':' NAT)?)?
  Action action() {
    auto first = identifier();
    if (!first) fail("expected an action");
    std::optional<Nat> first_argument;
    if (consume(":")) first_argument = expect_nat();
    if (!consume(".")) return Action{std::nullopt, std::move(*first), first_argument};

    std::string focus = std::move(*first);
    if (first_argument) focus += ":" + std::to_string(*first_argument);
    auto method = identifier();
    if (!method) fail("expected a method name after '.'");
    std::optional<Nat> argument;
    if (consume(":")) argument = expect_nat();
    return Action{std::move(focus), std::move(*method), argument};
  }

  [[noreturn]] void fail(const std::string& message) const {
    std::size_t line = first_line_;
    std::size_t column = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(line, column, message);
  }

  std::size_t offset() const { return pos_; }

 private:
  std::string_view text_;
  std::size_t first_line_;
  std::size_t pos_ = 0;
};

}  // namespace pgakit::detail
