// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace dtb {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad inputs: configs, file formats, shapes, physical preconditions.
// The CLI maps these to exit code 2.
struct ValidationError : Error {
  using Error::Error;
};

// Numerical failures discovered mid-computation. CLI exit code 3.
struct NumericalError : Error {
  using Error::Error;
};

struct NonSymmetric : NumericalError {
  using NumericalError::NumericalError;
};

// index is the 1-based leading minor (scalar case) or block (block case)
// where positive definiteness was lost; 0 when not attributable.
struct NotPositiveDefinite : NumericalError {
  explicit NotPositiveDefinite(const std::string& what, int index = 0)
      : NumericalError(what), index(index) {}
  int index;
};

struct Singular : NumericalError {
  using NumericalError::NumericalError;
};

struct DomainError : NumericalError {
  using NumericalError::NumericalError;
};

struct NonContractive : NumericalError {
  using NumericalError::NumericalError;
};

struct NonPositive : NumericalError {
  using NumericalError::NumericalError;
};

struct ShapeMismatch : ValidationError {
  using ValidationError::ValidationError;
};

struct InvalidMedium : ValidationError {
  using ValidationError::ValidationError;
};

struct CflViolation : ValidationError {
  using ValidationError::ValidationError;
};

struct DegenerateSensors : ValidationError {
  using ValidationError::ValidationError;
};

struct InsufficientFrames : ValidationError {
  using ValidationError::ValidationError;
};

struct FormatError : ValidationError {
  using ValidationError::ValidationError;
};

struct ConfigError : ValidationError {
  using ValidationError::ValidationError;
};

}  // namespace dtb
