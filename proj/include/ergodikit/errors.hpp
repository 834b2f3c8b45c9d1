#pragma once

#include <stdexcept>
#include <string>

namespace ergodikit {

/// Base of every error thrown by the library. The CLI maps the concrete
/// kinds onto exit codes (validation 2, numerical 3, io 4).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: out-of-range symbols, non-stochastic rows, bad config.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Iterative method failed or a numerical guarantee could not be met.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ergodikit
