#pragma once

#include <stdexcept>
#include <string>

namespace nmsim {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shape or subsystem-layout mismatch in an argument.
struct DimensionError : Error {
  using Error::Error;
};

// A mathematical invariant (hermiticity, trace, positivity, ...) failed
// beyond its tolerance.
struct InvariantViolation : Error {
  using Error::Error;
};

// A computation could not be carried out reliably (singular map, divergent
// rate, truncation too small, ...).
struct NumericalError : Error {
  using Error::Error;
};

// Bad scenario configuration.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace nmsim
