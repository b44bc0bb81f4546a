#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cauim {

enum class ErrorCode {
  ParseError,
  EmptyGraph,
  EmptyHyperedge,
  DuplicateMember,
  OutOfRange,
  DegenerateArm,
  InvalidArgument,
  BudgetExceeded,
  Io,
};

const char* to_string(ErrorCode code);

// Single exception type for the library; the code distinguishes failure kinds
// so callers (the CLI in particular) can map them to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Parse failures carry the 1-based line number of the offending input line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what, ErrorCode code = ErrorCode::ParseError)
      : Error(code, "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace cauim
