#pragma once

#include <stdexcept>
#include <string>

namespace hyperlab {

// Error taxonomy shared by every module. The CLI maps each class onto an exit
// code, so throw the most specific one.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-domain input (unknown symbol, K <= 2C, p < 1, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A configured size cap would be exceeded (ball size, quadruple count, window).
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver failed to converge or data is numerically degenerate.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// The request is well-formed but not supported for this group kind.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// A mathematical invariant that must hold by construction was violated.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// Reading a configuration file or writing a report failed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace hyperlab
