#pragma once

#include <stdexcept>
#include <string>

namespace ntb {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (files, trajectories, configs).
class DataError : public Error {
 public:
  using Error::Error;
};

/// An internal invariant did not hold. Indicates a bug, not bad input.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace ntb
