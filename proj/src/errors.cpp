#include "pgakit/errors.hpp"

#include <algorithm>

namespace pgakit {

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::string to_string(const Diagnostic& diagnostic) {
  std::string out = diagnostic.severity == Severity::Error ? "error" : "warning";
  if (diagnostic.position != 0) out += " at " + std::to_string(diagnostic.position);
  return out + ": " + diagnostic.message;
}

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

namespace {

std::string summarize(const std::vector<Diagnostic>& diagnostics) {
  std::string out;
  for (const auto& d : diagnostics) {
    if (d.severity != Severity::Error) continue;
    if (!out.empty()) out += "; ";
    out += to_string(d);
  }
  return out.empty() ? "validation failed" : out;
}

}  // namespace

ValidationError::ValidationError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(summarize(diagnostics)), diagnostics_(std::move(diagnostics)) {}

}  // namespace pgakit
