#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "thermolearn/dissipative.hpp"
#include "thermolearn/mlp.hpp"
#include "thermolearn/states.hpp"
#include "thermolearn/tape.hpp"

namespace thermo {

struct ObsVars {
  std::vector<ad::Var> q, v, T;
};

// Thermal Lagrangian G(q, v, T_1..T_P). One emit function serves training
// (operands are leaves of the callers' tape) and plain evaluation (scratch
// tape); derivatives always come from the tape, so the residuals used for
// learning and for stepping are the same expressions.
struct GField {
  int n_q = 0;
  int P = 1;
  std::function<ad::Var(ad::Tape&, std::span<const ad::Var> q,
                        std::span<const ad::Var> v,
                        std::span<const ad::Var> T)>
      emit;
};

/// Per-entropy-channel friction forces F^(i)(q, v, T), each of length n_q.
struct ForceField {
  int n_q = 0;
  int P = 1;
  std::function<std::vector<ad::Var>(ad::Tape&, int channel,
                                     std::span<const ad::Var> q,
                                     std::span<const ad::Var> v,
                                     std::span<const ad::Var> T)>
      emit_channel;
};

/// Hamiltonian over phase space, used for ground truth and validation.
struct PhaseHamiltonian {
  int n_q = 0;
  int P = 1;
  std::function<ad::Var(ad::Tape&, std::span<const ad::Var> q,
                        std::span<const ad::Var> p,
                        std::span<const ad::Var> S)>
      emit;
};

// Reduced (rigid-body) counterparts over (Omega, T) and (mu, S).
struct ReducedGField {
  std::function<ad::Var(ad::Tape&, std::span<const ad::Var> omega, ad::Var T)>
      emit;
};

struct ReducedForceField {
  std::function<std::array<ad::Var, 3>(ad::Tape&,
                                       std::span<const ad::Var> omega,
                                       ad::Var T)>
      emit;
};

struct ReducedHamiltonian {
  std::function<ad::Var(ad::Tape&, std::span<const ad::Var> mu, ad::Var S)>
      emit;
};

/// (q, dH/dp, dH/dS_1..P) at s; throws NonpositiveTemperature if any
/// dH/dS_i <= 0 (the phase point is outside the physical domain).
ObservableState observable_from_phase(const PhaseHamiltonian& H,
                                      const PhaseState& s);

ReducedObservable observable_from_phase(const ReducedHamiltonian& h,
                                        const ReducedPhase& s);

// Value and first derivatives of G at one observable point (scratch tape).
struct GEval {
  double G = 0.0;
  Vec dG_dq, dG_dv, dG_dT;
};
GEval eval_gfield(const GField& g, const ObservableState& s);

std::vector<Vec> eval_forces(const ForceField& f, const ObservableState& s);

/// Total energy in observable variables: dG/dv . v + sum_i T_i dG/dT_i - G.
double energy_observable(const GField& g, const ObservableState& s);
double energy_observable(const ReducedGField& g, const ReducedObservable& s);

// MLP-backed fields for simulation with trained models (net parameters are
// baked in as tape constants on each evaluation).
GField make_mlp_gfield(nets::MlpModel net, int n_q, int P);
ForceField make_dissipative_force_field(
    std::vector<nets::DissipativeForceModel> channels, int n_q, int P);
ReducedGField make_mlp_reduced_gfield(nets::MlpModel net);
ReducedForceField make_dissipative_reduced_force_field(
    nets::DissipativeForceModel model);

}  // namespace thermo
