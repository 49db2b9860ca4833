#pragma once

#include <stdexcept>
#include <string>

namespace randblock {

/// Invalid parameters or configuration. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine could not produce a trustworthy result
/// (non-convergence, overflow, near-singular system). CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// z lies in, or too close to, the spectrum of a finite operator.
class NearSpectrumError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace randblock
