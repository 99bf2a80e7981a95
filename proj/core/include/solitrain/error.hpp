#pragma once

#include <stdexcept>
#include <string>

namespace solitrain {

// Base for all library errors. Subclasses map onto the CLI exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid input: a precondition on a grid, schedule, config or file failed.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Non-finite or runaway amplitude during time stepping.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

// A calibration sweep produced data that violates the table invariants.
class CalibrationError : public Error {
 public:
  using Error::Error;
};

// Frequency outside the range covered by a calibration table.
class DecodeRangeError : public Error {
 public:
  using Error::Error;
};

// Calibration table built under a different simulator configuration.
class FingerprintMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace solitrain
