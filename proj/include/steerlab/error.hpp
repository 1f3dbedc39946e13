#pragma once

#include <stdexcept>
#include <string>

namespace steerlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

// Negative eigenvalue beyond rounding tolerance.
class NotPSD : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class SingularMatrix : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

}  // namespace steerlab
