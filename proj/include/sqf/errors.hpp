#pragma once

#include <stdexcept>
#include <string>

namespace sqf {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid or unstable model parameters.
struct ParamError : Error {
  using Error::Error;
};

// Evaluation requested on or too close to a branch cut.
struct CutError : Error {
  using Error::Error;
};

// Evaluation at a pole of the requested function.
struct PoleError : Error {
  using Error::Error;
};

// Root tracking along a continuation path could not be completed
// without risking a label swap.
struct ContinuationError : Error {
  using Error::Error;
};

// The M series did not converge within the configured term cap,
// or an orbit left the labelable domain.
struct SeriesError : Error {
  using Error::Error;
};

}  // namespace sqf
