#include "netest/error.hpp"

namespace netest {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput:
      return "invalid-input";
    case ErrorKind::kParse:
      return "parse";
    case ErrorKind::kInfeasible:
      return "infeasible";
    case ErrorKind::kSingular:
      return "singular";
    case ErrorKind::kUnsupportedStructure:
      return "unsupported-structure";
    case ErrorKind::kSizeGuard:
      return "size-guard";
    case ErrorKind::kVerification:
      return "verification";
  }
  return "unknown";
}

namespace {

std::string format_location(const std::string& source, std::size_t line,
                            std::size_t column, const std::string& message) {
  std::string out = source;
  if (line > 0) {
    out += ":" + std::to_string(line);
    if (column > 0) out += ":" + std::to_string(column);
  }
  out += ": " + message;
  return out;
}

}  // namespace

ParseError::ParseError(const std::string& source, std::size_t line,
                       std::size_t column, const std::string& message)
    : Error(ErrorKind::kParse, format_location(source, line, column, message)),
      source_(source),
      line_(line),
      column_(column) {}

}  // namespace netest
