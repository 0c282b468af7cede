#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace netest {

/// Broad failure classes. The CLI maps each one onto a stable exit code.
enum class ErrorKind {
  kInvalidInput,
  kParse,
  kInfeasible,
  kSingular,
  kUnsupportedStructure,
  kSizeGuard,
  kVerification,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parse failure with a 1-based source location (0 when unknown).
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, std::size_t column,
             const std::string& message);

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::string source_;
  std::size_t line_;
  std::size_t column_;
};

}  // namespace netest
