#pragma once

#include <stdexcept>
#include <string>

namespace gevlab {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation was violated by the caller.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Floating-point trouble: overflow of an exponential weight, NaN/Inf, etc.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace gevlab
