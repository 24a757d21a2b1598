#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ndopt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter is outside the range a measure, reward or solver accepts.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// A function was evaluated outside its domain (negative G-mean rate,
/// vanishing fractional-linear denominator, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A pseudo-linear measure and reward cap violate the regularity
/// conditions that the alternating maximization rate relies on.
class RegularityError : public Error {
 public:
  using Error::Error;
};

/// Malformed, empty or single-class input data.
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace ndopt
