#pragma once

#include <stdexcept>
#include <string>

namespace isoflow {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside an operation's documented domain.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Malformed text input; carries the 1-based line number (0 when unknown).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Mesh violates the face-to-face conformity rules.
class ConformityError : public Error {
 public:
  using Error::Error;
};

}  // namespace isoflow
