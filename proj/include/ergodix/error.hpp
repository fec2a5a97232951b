#pragma once

#include <stdexcept>
#include <string>

namespace ergodix {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (bad dimensions, invalid parameters).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical postcondition the library relies on did not hold.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Experiment configuration did not validate against the schema.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ergodix
