#pragma once

#include <stdexcept>
#include <string>

namespace fhl {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Violated precondition on parameters (dt, s, r, grid sizes, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Non-finite or otherwise unusable input data.
class InputError : public Error {
 public:
  using Error::Error;
};

class GridMismatchError : public Error {
 public:
  using Error::Error;
};

// A cylinder or ball that contains no grid sample.
class EmptyRegionError : public Error {
 public:
  using Error::Error;
};

// A hypothesis of an inequality (nonnegativity, supersolution) failed its audit.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

// Quadrature tail bound above tolerance.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

class EstimationError : public Error {
 public:
  using Error::Error;
};

}  // namespace fhl
