#pragma once

#include <stdexcept>
#include <string>

namespace rtmvdr {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidScenario : Error {
  using Error::Error;
};
struct InvalidRho : Error {
  using Error::Error;
};
struct InvalidRegime : Error {
  using Error::Error;
};
struct DegenerateRho : Error {
  using Error::Error;
};
struct DegenerateSnapshot : Error {
  using Error::Error;
};
struct NonConvergence : Error {
  using Error::Error;
};
struct SingularMatrix : Error {
  using Error::Error;
};
struct NoBracket : Error {
  using Error::Error;
};
struct QuadratureFailure : Error {
  using Error::Error;
};
struct NegativeVariance : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct EmptySamples : Error {
  using Error::Error;
};
struct SupportMismatch : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

}  // namespace rtmvdr
