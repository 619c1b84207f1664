#pragma once

#include <string>
#include <vector>

#include "thermolearn/errors.hpp"
#include "thermolearn/linalg.hpp"

namespace thermo {

/// Full phase-space point (q, p, S_1..S_P). Ground truth and validation only;
/// learning never consumes these.
struct PhaseState {
  Vec q;
  Vec p;
  Vec S;
};

/// Measurable tuple (q, v, T_1..T_P); the only data learning may consume.
/// Temperatures must be strictly positive (the entropy update divides by T),
/// which checked() enforces; aggregate init is reserved for IO/validation.
struct ObservableState {
  Vec q;
  Vec v;
  Vec T;

  static ObservableState checked(Vec q, Vec v, Vec T);
};

/// Reduced observable for the rigid body: body angular velocity and one T.
struct ReducedObservable {
  Vec3 omega{0.0, 0.0, 0.0};
  double T = 1.0;

  static ReducedObservable checked(Vec3 omega, double T);
};

/// Reduced phase point: body angular momentum and entropy.
struct ReducedPhase {
  Vec3 mu{0.0, 0.0, 0.0};
  double S = 0.0;
};

enum class StateKind { kThermal, kReduced };

// One (start, end, h) pair of observable states. Reduced states are stored in
// the same container with n_q = 0 and v carrying Omega.
struct ObservablePair {
  int traj_id = 0;
  double h = 0.0;
  ObservableState start;
  ObservableState end;
};

struct DatasetMeta {
  std::string system;          // "piston", "rigid_body", ...
  StateKind kind = StateKind::kThermal;
  int n_q = 0;
  int P = 0;
  double h = 0.0;
  int n_traj = 0;
  int traj_len = 0;
  std::uint64_t seed = 0;
  double rel_tol = 0.0, abs_tol = 0.0;
  std::string generator;
};

struct TrajectoryDataset {
  std::vector<ObservablePair> pairs;
  DatasetMeta meta;
};

struct DatasetViolation {
  int pair_index = -1;
  std::string rule;
};

/// Empty iff all TrajectoryDataset invariants hold: positive h, positive
/// temperatures, uniform dimensions, and exact end-to-start chaining within
/// each trajectory id. Violations are data, not failures.
std::vector<DatasetViolation> validate_dataset(const TrajectoryDataset& d);

/// Reduced <-> flat observable embedding (n_q = 0, v = Omega).
ObservableState to_observable(const ReducedObservable& r);
ReducedObservable to_reduced(const ObservableState& s);

}  // namespace thermo
