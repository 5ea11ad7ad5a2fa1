#pragma once

#include <stdexcept>
#include <string>

namespace rlab {

// Usage-class errors (bad parameters, bad config) map to CLI exit code 1;
// everything deriving from DataError maps to exit code 2.

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public DataError {
 public:
  using DataError::DataError;
};

class FormatError : public DataError {
 public:
  using DataError::DataError;
};

class InsufficientData : public DataError {
 public:
  using DataError::DataError;
};

class InvalidState : public DataError {
 public:
  using DataError::DataError;
};

class ResourceError : public DataError {
 public:
  using DataError::DataError;
};

// Two-sample statistics that cannot be computed exactly (ties) or at all
// (zero variance).
class TiesError : public DataError {
 public:
  using DataError::DataError;
};

class DegenerateSample : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace rlab
