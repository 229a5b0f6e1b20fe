#pragma once

#include <stdexcept>
#include <string>

namespace rydkcm {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument to a pure function (index out of range, negative time, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Hilbert-space or state-space dimension above the configured cap.
class DimensionError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// Time step too coarse for the first-order jump draw.
class StepSizeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Adaptive integrator could not meet its tolerance or broke an invariant.
class IntegratorError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Degenerate spectrum or kernel where a unique answer was expected.
class DegenerateError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace rydkcm
