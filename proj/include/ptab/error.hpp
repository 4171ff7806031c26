#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ptab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Syntax error in program or query text. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Well-formed text that violates a program invariant (arity, safety, groundness).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Operation not permitted in the table's current lifecycle state.
class StateError : public Error {
 public:
  using Error::Error;
};

class ArityError : public Error {
 public:
  using Error::Error;
};

// Evaluation exceeded a configured bound.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// Failure inside an evaluator, e.g. a worker thread threw.
class EvalError : public Error {
 public:
  using Error::Error;
};

// Raised in debug-disjoint mode when two child answer tables share a tuple.
class DisjointnessError : public EvalError {
 public:
  using EvalError::EvalError;
};

}  // namespace ptab
