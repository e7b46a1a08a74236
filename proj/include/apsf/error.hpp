#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace apsf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A warping function failed the boundary or strict-monotonicity conditions.
class InvalidWarp : public Error {
 public:
  using Error::Error;
};

/// Zero-norm functions, singular designs and similar degenerate inputs.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class DegenerateCovariance : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what, const std::string& source = "")
      : Error((source.empty() ? "" : source + ", ") + "line " + std::to_string(line) + ": " + what),
        line_(line),
        detail_(what) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Bad command line; maps to exit status 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace apsf
