#pragma once

#include <stdexcept>
#include <string>

namespace wavevel {

/// Base of all library-specific failures. Precondition violations on plain
/// arguments (bad sizes, bad grid extents) use std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time derivatives requested from too few frames.
class InsufficientFrames : public Error {
 public:
  using Error::Error;
};

/// psi_t = 0 and grad psi = 0: the fixed-value attribute carries no motion.
class StationaryDegenerate : public Error {
 public:
  using Error::Error;
};

/// Contraction requested with an invalid first-order velocity or psi_t = 0.
class UndefinedContraction : public Error {
 public:
  using Error::Error;
};

class TrackingError : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public TrackingError {
 public:
  using TrackingError::TrackingError;
};

class SingularHessian : public TrackingError {
 public:
  using TrackingError::TrackingError;
};

/// The tracked attribute left the grid or no level crossing exists.
class AttributeLost : public TrackingError {
 public:
  using TrackingError::TrackingError;
};

class FieldFileError : public Error {
 public:
  enum class Kind { io, format, length };

  FieldFileError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace wavevel
