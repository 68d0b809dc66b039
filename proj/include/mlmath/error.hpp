#pragma once

#include <stdexcept>
#include <string>

namespace mlmath {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (files, records). Maps to CLI exit code 3.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Bad parameters or preconditions supplied by the caller.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace mlmath
