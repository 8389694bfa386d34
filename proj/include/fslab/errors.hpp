#pragma once

#include <stdexcept>
#include <string>

namespace fslab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched sizes or invalid dimensions passed to a builder.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Errors that come from the numerics rather than from bad input shapes.
/// The CLI maps these to exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The truncated Fock space is too small for the requested state.
class TruncationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A geometric series with |r| >= 1 cannot be normalized.
class DivergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Bulk bands overlap or touch, so no in-gap window exists.
class NoGapError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InsufficientSupportError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// |v| == |w|: the Bloch off-diagonal element passes through the origin.
class GapClosureError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NormalizationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The adaptive integrator could not meet its tolerance.
class StepFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace fslab
