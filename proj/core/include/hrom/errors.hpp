#pragma once

#include <stdexcept>
#include <string>

namespace hrom {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid user-facing parameters (bounds, counts, penalty, rank requests).
struct ConfigError : Error {
  using Error::Error;
};

/// Non-conforming periodic grid, unmatched boundary edge, degenerate triangle.
struct MeshError : Error {
  using Error::Error;
};

/// Point-location or index lookups outside their domain.
struct LookupError : Error {
  using Error::Error;
};

/// Degenerate numerical input (all-zero snapshots, zero singular spectrum).
struct DegenerateInputError : Error {
  using Error::Error;
};

/// Leading singular value block is numerically rank deficient.
struct RankDeficiencyError : Error {
  using Error::Error;
};

/// Nonlinear solve did not reach the requested residual tolerance.
struct NewtonFailure : Error {
  NewtonFailure(const std::string& what, int iterations_, double residual_)
      : Error(what), iterations(iterations_), residual(residual_) {}
  int iterations;
  double residual;
};

/// Time integration aborted; carries the failing step index.
struct IntegrationError : Error {
  IntegrationError(const std::string& what, long step_)
      : Error(what), step(step_) {}
  long step;
};

struct IoError : Error {
  using Error::Error;
};

/// DMD mode extrapolation exceeded the floating point range.
struct SaturationError : Error {
  using Error::Error;
};

}  // namespace hrom
