#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mixel {

// Base for every error raised by the library. Callers that only need to
// report a failure can catch this; tests catch the concrete types.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Grid or matrix has an unsupported size (e.g. non-power-of-two Hadamard order).
class SizeError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class PermutationError : public Error {
 public:
  using Error::Error;
};

// Physical quantity or index out of its admissible range.
class RangeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Mismatched or ragged dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class VersionError : public Error {
 public:
  using Error::Error;
};

// Malformed document. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// A value failed validation; names the offending cell.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::size_t row, std::size_t col)
      : Error(what + " at cell (" + std::to_string(row) + ", " + std::to_string(col) + ")"),
        row_(row),
        col_(col),
        has_cell_(true) {}

  explicit ValidationError(const std::string& what) : Error(what) {}

  bool has_cell() const noexcept { return has_cell_; }
  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_ = 0;
  std::size_t col_ = 0;
  bool has_cell_ = false;
};

}  // namespace mixel
