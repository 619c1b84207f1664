#pragma once

#include <array>

#include "thermolearn/fields.hpp"
#include "thermolearn/newton.hpp"
#include "thermolearn/states.hpp"

namespace thermo::integrators {

/// hat(w) u = w x u for all u.
Mat3 hat(const Vec3& w);

/// Inverse of hat; input must be antisymmetric to 1e-12 (NotSkew otherwise).
Vec3 vee(const Mat3& a);

struct ResidualOptions {
  // Velocity multiplying the force in the entropy line when the pair comes
  // from data: the state's own v (default) or the difference quotient
  // (q_b - q_a)/h. Force arguments always use the state's v.
  enum class EntropyVelocity { kStateVelocity, kFiniteDifference };
  EntropyVelocity entropy_velocity = EntropyVelocity::kStateVelocity;
  // Replace the endpoint force evaluations with the average of both ends.
  bool force_midpoint = false;
};

/// Left-minus-right residuals of the three discrete equations.
struct ResidualReport {
  Vec r_momentum;  // n_q
  Vec r_entropy;   // P
  Vec r_velocity;  // n_q
  double max_abs() const;
};

// Tape counterparts used to assemble training losses; the plain versions
// below evaluate the same expressions on a scratch tape.
struct ThermalResidualVars {
  std::vector<ad::Var> r_momentum, r_entropy, r_velocity;
};

ThermalResidualVars residuals_thermal_vars(ad::Tape& tape, const GField& g,
                                           const ForceField& f,
                                           const ObsVars& a, const ObsVars& b,
                                           double h,
                                           const ResidualOptions& opts = {});

ResidualReport residuals_thermal(const GField& g, const ForceField& f,
                                 const ObservableState& a,
                                 const ObservableState& b, double h,
                                 const ResidualOptions& opts = {});

struct So3ResidualVars {
  std::array<ad::Var, 3> r_momentum;
  ad::Var r_entropy;
};

So3ResidualVars residuals_so3_vars(ad::Tape& tape, const ReducedGField& g,
                                   const ReducedForceField& f,
                                   std::span<const ad::Var> omega_a,
                                   ad::Var T_a,
                                   std::span<const ad::Var> omega_b,
                                   ad::Var T_b, double h,
                                   const ResidualOptions& opts = {});

ResidualReport residuals_so3(const ReducedGField& g,
                             const ReducedForceField& f,
                             const ReducedObservable& a,
                             const ReducedObservable& b, double h,
                             const ResidualOptions& opts = {});

struct StepOptions {
  NewtonOptions newton;
  ResidualOptions residual;
};

/// One step of the thermal variational scheme: q_b = q_a + h v_a is explicit,
/// then Newton solves the momentum and entropy lines for (v_b, T_b).
ObservableState step_thermal(const GField& g, const ForceField& f,
                             const ObservableState& a, double h,
                             const StepOptions& opts = {});

ReducedObservable step_so3(const ReducedGField& g, const ReducedForceField& f,
                           const ReducedObservable& a, double h,
                           const StepOptions& opts = {});

/// One step of the canonical phase-space scheme, implicit only in p_{k+1}.
PhaseState step_canonical(const PhaseHamiltonian& H, const ForceField& f,
                          const PhaseState& a, double h,
                          const StepOptions& opts = {});

}  // namespace thermo::integrators
