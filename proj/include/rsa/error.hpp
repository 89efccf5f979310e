#pragma once

#include <stdexcept>
#include <string>

namespace rsa {

// Base for every error the library raises. The CLI maps the two subclasses
// onto distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violates a documented precondition or invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace rsa
