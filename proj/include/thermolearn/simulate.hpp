#pragma once

#include <string>

#include "thermolearn/integrators.hpp"
#include "thermolearn/states.hpp"

namespace thermo::sim {

// One rolled trajectory with per-step diagnostics. Momentum and entropy are
// the raw Legendre reads p = dG/dv, S_i = dG/dT_i; for learned models they
// are gauge-dependent up to additive constants (align endpoints to compare).
struct Trajectory {
  StateKind kind = StateKind::kThermal;
  double h = 0.0;
  std::vector<ObservableState> states;  // reduced states flattened (v=Omega)
  Vec energy;
  std::vector<Vec> entropy;
  std::vector<Vec> momentum;
};

Trajectory simulate_thermal(const GField& g, const ForceField& f,
                            const ObservableState& init, int steps, double h,
                            const integrators::StepOptions& opts = {});

Trajectory simulate_reduced(const ReducedGField& g,
                            const ReducedForceField& f,
                            const ReducedObservable& init, int steps, double h,
                            const integrators::StepOptions& opts = {});

/// Columns: step,t,q...,v...,T...,E,S...,p...
void write_trajectory_csv(const Trajectory& t, const std::string& path);
Trajectory read_trajectory_csv(const std::string& path);

struct Metrics {
  Vec mae;                      // per observable column (q..., v..., T...)
  std::vector<std::string> mae_columns;
  double energy_drift = 0.0;            // max |E_k - E_0| of the trajectory
  double energy_drift_vs_ref = 0.0;     // max |E_k - E_ref,k|
  Vec nonobservable_mae;                // S/p columns, endpoint-aligned
  int entropy_violations = 0;           // steps with any dS_i < -1e-12
  int steps = 0;
};

/// Compares a trajectory against a reference on the same grid
/// (GridMismatch otherwise). Observable columns are compared directly;
/// S and p columns are aligned at the final point first.
Metrics evaluate(const Trajectory& traj, const Trajectory& ref);

std::string metrics_to_json(const Metrics& m);

}  // namespace thermo::sim
