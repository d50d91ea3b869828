#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cmasim {

/// Base of every error raised by the library. Callers that only care about
/// "something in the model was wrong" can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value lies outside the mathematical domain of an operation
/// (negative diameter, expansion passed as contraction, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent user input (unsorted timelines, overlapping beads).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Numerical configuration that the integrators refuse to run with.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Query outside the valid interval of a lookup.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// A fitting routine could not produce a usable parameter set.
class CalibrationError : public Error {
 public:
  using Error::Error;
};

/// JSON or CSV text that does not parse. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A parsed document violates an invariant. `field()` is the dotted path of the
/// offending entry, e.g. "transport.dt".
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace cmasim
