#pragma once

#include <stdexcept>
#include <string>

namespace aeroclass {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input that violates a documented contract: malformed documents, unknown
/// ids, out-of-range values or hyperparameters.
class ValidationError : public Error {
public:
  using Error::Error;
};

} // namespace aeroclass
