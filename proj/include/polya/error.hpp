#pragma once

#include <stdexcept>

namespace polya {

// Base class for all errors thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed textual input (JSON model files, CSV trajectories).
struct ParseError : Error {
  using Error::Error;
};

// Structurally invalid values: bad weights, mismatched spaces, broken invariants.
struct ValidationError : Error {
  using Error::Error;
};

// normalize() on a measure with zero total mass.
struct ZeroMassError : ValidationError {
  using ValidationError::ValidationError;
};

// Conditioning on a block that carries no mass.
struct ZeroMassBlockError : ValidationError {
  using ValidationError::ValidationError;
};

// Enumeration and verification guards (k^L caps, Bell bounds, empty input).
struct OutOfRangeError : Error {
  using Error::Error;
};

// A finite coefficient list was asked for an index past its horizon.
struct HorizonExceededError : Error {
  using Error::Error;
};

// rebalance() on a kernel whose row masses differ.
struct NotConstantMassError : Error {
  using Error::Error;
};

// coefficient_solution() at defect 1, where no admissible sequence exists.
struct DegenerateError : Error {
  using Error::Error;
};

// block_predictive_mass() found differing masses within one history group.
struct NotSufficientError : Error {
  using Error::Error;
};

}  // namespace polya
