#pragma once

#include <stdexcept>
#include <string>

namespace dtmon {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (automaton document, scenario, words).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Timed-word concatenation or ordering precondition violated.
class OrderingError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A runtime assumption of the distributed setting does not hold
/// (skew bound, FIFO order, strict local order, ...).
class AssumptionViolation : public Error {
 public:
  AssumptionViolation(std::string assumption, const std::string& detail)
      : Error(assumption + ": " + detail), assumption_(std::move(assumption)) {}

  const std::string& assumption() const noexcept { return assumption_; }

 private:
  std::string assumption_;
};

/// An enumeration or fixpoint exceeded its configured cap.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

/// Requested analysis mode is not supported for this input.
class UnsupportedMode : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace dtmon
