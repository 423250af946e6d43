#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pgakit {

enum class Severity { Warning, Error };

/// A positioned finding from one of the validators. Positions are 1-based;
/// zero means the finding is not tied to a single position.
struct Diagnostic {
  Severity severity = Severity::Error;
  std::size_t position = 0;
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

bool has_errors(const std::vector<Diagnostic>& diagnostics);
std::string to_string(const Diagnostic& diagnostic);

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Thrown when an operation's input fails validation; carries every finding.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Diagnostic> diagnostics);

  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

/// An internal step or size budget ran out before a result was reached.
class BudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pgakit
