#pragma once

#include <stdexcept>
#include <string>

namespace lmlab {

// Every domain failure the library raises derives from Error, so callers
// (the CLI in particular) can separate domain violations from I/O problems.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

// Bin index or price outside the pool's [i_min, i_max] window.
struct RangeError : Error {
  using Error::Error;
};

// Active-bin deposit whose Y/X ratio does not match the current price.
struct CouplingError : Error {
  using Error::Error;
};

// Nonzero amount of the wrong token for a one-sided bin.
struct SideError : Error {
  using Error::Error;
};

struct PreconditionError : Error {
  using Error::Error;
};

// A nonzero budget that no supported bin can receive.
struct UnallocatableError : Error {
  using Error::Error;
};

struct SizeError : Error {
  using Error::Error;
};

struct DesignError : Error {
  using Error::Error;
};

struct DirectionError : Error {
  using Error::Error;
};

// Metric is undefined for the given state (e.g. slippage with no liquidity).
struct MetricError : Error {
  using Error::Error;
};

struct ScenarioError : Error {
  using Error::Error;
};

}  // namespace lmlab
