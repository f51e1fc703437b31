#pragma once

#include <stdexcept>
#include <string>

namespace persuasion {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad instance, inconsistent parameters, invalid scheme.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed to converge or hit a size cap.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace persuasion
