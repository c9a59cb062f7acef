#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sessionscreen {

// Base of every error raised by the library. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input record; line is 1-based, 0 when not line oriented.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Numerical failure: rank deficiency, non-convergence, undefined statistic.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace sessionscreen
