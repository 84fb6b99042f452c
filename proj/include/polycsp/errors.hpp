#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace polycsp {

/// Base class for every fault raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configured size cap would be exceeded. Operations refuse instead of
/// truncating; `required` is the amount the caller would have to allow.
class CapExceeded : public Error {
 public:
  CapExceeded(std::string what_cap, std::size_t required, std::size_t cap)
      : Error(what_cap + " cap exceeded: need " + std::to_string(required) +
              ", cap is " + std::to_string(cap)),
        cap_name(std::move(what_cap)),
        required(required),
        cap(cap) {}

  std::string cap_name;
  std::size_t required;
  std::size_t cap;
};

class SignatureMismatch : public Error {
 public:
  using Error::Error;
};

/// Out-of-range values, malformed objects, violated preconditions.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A result or an input failed re-verification.
class VerificationFailure : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& msg)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line(line),
        column(column) {}

  std::size_t line;
  std::size_t column;
};

}  // namespace polycsp
