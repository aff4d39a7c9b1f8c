#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gomk {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A node or item index outside its valid range, or a duplicated index.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// Invalid hyperparameter or option value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Mismatched matrix or set dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A structural invariant does not hold (non-injective matching, bad tree weights, ...).
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent dataset contents.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Syntax or consistency error in an input file; carries the 1-based line number.
class ParseError : public DataError {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : DataError(file + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Numerical failure during optimization (non-finite gradients, ...).
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace gomk
