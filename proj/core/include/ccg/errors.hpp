#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ccg {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input that violates a documented precondition or invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. `line()` is 1-based; 0 when no line applies.
class ParseError : public ValidationError {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class NoPathError : public Error {
 public:
  using Error::Error;
};

class EmptyFamilyError : public Error {
 public:
  using Error::Error;
};

class CapExceededError : public Error {
 public:
  using Error::Error;
};

}  // namespace ccg
