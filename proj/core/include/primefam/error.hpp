// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace primefam {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied argument violates an operation's precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An integer result would not fit in 64 bits.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// Reading or writing a file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A file parsed but its header, version or columns are not what we expect.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Matrix or feature dimensions disagree (e.g. a d=29 checkpoint fed d=25 rows).
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A statistic is undefined for the given input (all-positive class, <2 scales, ...).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// Training produced a NaN or infinite loss.
class NonFiniteLoss : public Error {
 public:
  NonFiniteLoss(int epoch, long batch, const std::string& what)
      : Error(what), epoch_(epoch), batch_(batch) {}
  int epoch() const noexcept { return epoch_; }
  long batch() const noexcept { return batch_; }

 private:
  int epoch_;
  long batch_;
};

}  // namespace primefam
