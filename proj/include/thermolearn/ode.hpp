#pragma once

#include <functional>

#include "thermolearn/errors.hpp"
#include "thermolearn/linalg.hpp"

namespace thermo::ode {

/// Right-hand side dy/dt = f(t, y).
using Rhs = std::function<void(double t, std::span<const double> y,
                               std::span<double> dydt)>;

struct OdeOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double initial_step = 1e-4;
  double max_step = 0.0;  // 0 = unlimited
  long max_steps = 2'000'000;
};

/// Integrates from t_grid.front() and returns the state at every grid time.
/// Adaptive embedded Dormand-Prince 5(4); steps are clamped to land exactly
/// on grid points. Throws StepSizeUnderflow when the controller stalls.
std::vector<Vec> integrate(const Rhs& rhs, const Vec& y0,
                           std::span<const double> t_grid,
                           const OdeOptions& opts = {});

}  // namespace thermo::ode
