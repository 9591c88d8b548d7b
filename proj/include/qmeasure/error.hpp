#pragma once

#include <stdexcept>
#include <string>

namespace qmeasure {

// Base of all errors raised by the library. Precondition violations on
// individual arguments use std::invalid_argument / std::out_of_range instead.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent experiment configuration.
class ConfigError : public Error {
public:
  using Error::Error;
};

// Quadrature, solver or truncation breakdown.
class NumericalError : public Error {
public:
  using Error::Error;
};

// Outcome distribution not contained in its scan grid.
class BoundaryMassError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

} // namespace qmeasure
