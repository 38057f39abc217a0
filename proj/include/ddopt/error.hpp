#pragma once

#include <stdexcept>
#include <string>

namespace ddopt {

/// Malformed input file. Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t line = 0)
      : std::runtime_error(line ? msg + " (line " + std::to_string(line) + ")" : msg), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Structurally valid input that violates a data invariant.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical routine hit an iteration cap or an unstable basis.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ddopt
