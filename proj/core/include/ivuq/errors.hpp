#pragma once

#include <stdexcept>
#include <string>

namespace ivuq {

/// Base of every error thrown by the library. `exit_code()` maps onto the CLI
/// contract: 1 for user/input errors, 2 for numerical failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Voxel whose b=0 sample is non-positive; callers usually skip it.
class DegenerateVoxel : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class EmptyRoi : public Error {
 public:
  using Error::Error;
};

class UndefinedMetric : public Error {
 public:
  using Error::Error;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

}  // namespace ivuq
