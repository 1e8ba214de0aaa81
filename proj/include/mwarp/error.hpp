#pragma once

#include <stdexcept>
#include <string>

namespace mwarp {

// Error kinds map one-to-one onto CLI exit codes (see tools/mwarp.cpp).

/// Caller violated a precondition (bad argument, shape mismatch, empty input).
class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input data or an I/O failure on a named path.
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine failed to reach its tolerance or produced a non-finite value.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace mwarp
