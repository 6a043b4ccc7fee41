#pragma once

#include <stdexcept>
#include <string>

namespace lq {

// Invalid user input. The CLI maps this to exit status 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Any failure of a numerical procedure. The CLI maps this to exit status 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// g1D closed form evaluated at the confinement-induced resonance.
class ResonanceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Single-particle spectrum shows no band structure at the requested depth.
class ShallowLatticeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegeneracyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace lq
