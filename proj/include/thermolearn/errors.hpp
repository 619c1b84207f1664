#pragma once

#include <stdexcept>
#include <string>

namespace thermo {

/// Input vector length does not match a declared arity.
struct ArityMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Operation outside the closed autodiff primitive set.
struct UnsupportedPrimitive : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A temperature (or dH/dS) was <= 0 where positivity is required.
struct NonpositiveTemperature : std::domain_error {
  using std::domain_error::domain_error;
};

struct NonpositiveVolume : std::domain_error {
  using std::domain_error::domain_error;
};

/// Piston coordinate outside (-L, L).
struct PistonOutOfRange : std::domain_error {
  using std::domain_error::domain_error;
};

/// (Omega, T) point with no real entropy preimage.
struct OutsidePhysicalDomain : std::domain_error {
  using std::domain_error::domain_error;
};

/// Matrix fails the antisymmetry check.
struct NotSkew : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Implicit step failed to converge; carries the final residual norm.
struct NewtonDiverged : std::runtime_error {
  double residual_inf;
  int iterations;
  NewtonDiverged(const std::string& what, double r, int it)
      : std::runtime_error(what), residual_inf(r), iterations(it) {}
};

/// Adaptive ODE step shrank below the representable limit.
struct StepSizeUnderflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Two trajectory files do not share a time grid.
struct GridMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Training loss became NaN/Inf; last good checkpoint is preserved.
struct NonfiniteLoss : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace thermo
