#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace navcurate {

/// Failure categories shared by every stage. The CLI maps each kind onto an
/// exit code, so new kinds must be added to `exit_code_for` as well.
enum class ErrorKind {
  Parse,
  Validation,
  Io,
  EmptyResult,
  GimbalDegenerate,
  TooShort,
  Infeasible,
  OutOfBounds,
  LengthMismatch,
  ShapeMismatch,
  AllUndefined,
  EmptyInput,
  InvalidSpec,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Malformed input. `line()` is 1-based; 0 when the error is not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line = 0)
      : Error(ErrorKind::Parse, with_line(message, line)), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  static std::string with_line(const std::string& message, std::size_t line) {
    return line == 0 ? message : "line " + std::to_string(line) + ": " + message;
  }

  std::size_t line_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message)
      : Error(ErrorKind::Validation, message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error(ErrorKind::Io, message) {}
};

}  // namespace navcurate
