#pragma once

#include <functional>

#include "thermolearn/errors.hpp"
#include "thermolearn/linalg.hpp"

namespace thermo {

struct NewtonOptions {
  double tol = 1e-11;   // convergence threshold on ||R||_inf
  int max_iter = 50;
  int max_halvings = 20;
  double fd_step = 1e-7;  // central-difference step, scaled by |x_j|
};

struct NewtonResult {
  Vec x;
  double residual_inf = 0.0;
  int iterations = 0;
};

/// Residual callback: writes R(x) into r, returns false when x is outside
/// the model's domain (treated as a rejected line-search trial).
using NewtonResidual =
    std::function<bool(std::span<const double> x, std::span<double> r)>;

/// Damped Newton with a central finite-difference Jacobian. Residuals of the
/// variational schemes already contain second derivatives of the model, so
/// the Jacobian is not computed by a third differentiation.
/// Throws NewtonDiverged with the final residual on failure.
NewtonResult newton_solve(const NewtonResidual& residual, Vec x0,
                          const NewtonOptions& opts = {});

}  // namespace thermo
