#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ncprox {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data is malformed or non-finite.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A parameter lies outside its admissible range.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// A function was called in a state its contract forbids.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

/// Text input could not be parsed; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace ncprox
