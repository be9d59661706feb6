#pragma once

#include <stdexcept>
#include <string>

namespace soficlab {

// Base for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operands belong to different groups (or different ranks).
class SpecMismatch : public Error {
 public:
  using Error::Error;
};

// Two patterns disagree on the intersection of their supports.
class OverlapConflict : public Error {
 public:
  using Error::Error;
};

// A finite window does not cover the cells a computation needs.
class WindowTooSmall : public Error {
 public:
  using Error::Error;
};

// Exhaustive enumeration would exceed the configured cap.
class SizeLimit : public Error {
 public:
  using Error::Error;
};

// The support of a pattern has a shape the operation cannot handle.
class UnsupportedShape : public Error {
 public:
  using Error::Error;
};

// A precondition stated by the operation contract does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class NotGroupShift : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& what)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace soficlab
