#pragma once

#include <stdexcept>
#include <string>

namespace rasch {

// Base class for every error raised by the library. The CLI maps these to
// exit code 1, except InvalidArgument which is a usage error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Raised by operations that enumerate all 2^k settings when k is too large.
class SizeGuardExceeded : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class SingularInformation : public Error {
 public:
  using Error::Error;
};

class NotSaturated : public Error {
 public:
  using Error::Error;
};

class SingularSupport : public Error {
 public:
  using Error::Error;
};

class NoBracket : public Error {
 public:
  using Error::Error;
};

class InfeasibleStart : public Error {
 public:
  using Error::Error;
};

class NotInAffineHull : public Error {
 public:
  using Error::Error;
};

}  // namespace rasch
