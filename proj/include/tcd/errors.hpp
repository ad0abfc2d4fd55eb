#pragma once

#include <stdexcept>

namespace tcd {

// Tensor-factor label conflicts or references to unknown labels.
struct LayoutError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A value violates a documented invariant (norm, trace, probability range, ...).
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Numeric failure during evaluation (CLI exit code 3).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Amplitude denominator too close to zero.
struct SingularityError : NumericError {
  using NumericError::NumericError;
};

// Grid does not span enough of a fringe period for the requested estimator.
struct InsufficientSpanError : NumericError {
  using NumericError::NumericError;
};

// Degenerate distribution or inconsistent binning in the Monte Carlo layer.
struct SamplingError : NumericError {
  using NumericError::NumericError;
};

// Bad configuration file or flags (CLI exit code 2).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace tcd
