#pragma once

#include <array>
#include <string>

#include "thermolearn/fields.hpp"
#include "thermolearn/ode.hpp"
#include "thermolearn/states.hpp"

namespace thermo::systems {

// Two ideal-gas chambers separated by an adiabatic piston. Chamber areas
// are A1 = 1, A2 = 2 with V1 = A1(L + x), V2 = A2(L - x): the only
// assignment consistent with the validation temperatures {0.8951, 0.7926}
// at (x, S1, S2) = (0.5, 0.5, 0.5); see README.
struct PistonParams {
  double m = 1.0;
  double A1 = 1.0;
  double A2 = 2.0;
  double L = 2.0;
  double NkB = 1.0;
  double c_hat = 1.0;
  std::array<double, 2> nu{0.02, 0.04};
  std::array<double, 2> kappa{2.0, 1.0};
};

// Dissipative rigid body. The kinetic prefactor 1/2 and U0 = 1 are the
// unique reading that reproduces the validation point Omega = I^-1 mu and
// T ~= 1.229 at mu = (0.5, -0.5, -0.5), S = 0.
struct RigidBodyParams {
  Vec3 inertia{1.0, 2.0, 3.0};
  double gamma = 1.0;
  double U0 = 1.0;
  double nu0 = 0.01;
  double nu1 = 0.01;
  Mat3 Amix{{{1.0, 0.5, 0.5}, {0.5, 1.0, 0.5}, {0.5, 0.5, 1.0}}};
};

/// Ideal-gas internal energy (c_hat V)^(-2/3) e^(S/NkB); V must be > 0.
double sackur_tetrode_U(double S, double V, double NkB = 1.0,
                        double c_hat = 1.0);

double piston_hamiltonian(const PistonParams& p, const PhaseState& s);

/// Friction channel i: F^(i) = -lambda_i v with
/// lambda_i = nu_i + kappa_i v^2 (1 + 0.1 T_i^2); each channel is dissipative
/// (F^(i) . v <= 0), matching S-dot_i = lambda_i v^2 / T_i >= 0.
std::vector<Vec> piston_forces(const PistonParams& p,
                               const ObservableState& obs);

double rigid_hamiltonian(const RigidBodyParams& rp, const Vec3& mu, double S);

/// f = -nu0 Omega - nu1 A^T tanh(A Omega); dissipative for all Omega.
Vec3 rigid_friction(const RigidBodyParams& rp, const Vec3& omega, double T);

/// Thermal Lagrangian of the rigid body, reconstructed through the + root of
/// U0 z^2 - (T/gamma) z + (Omega . I Omega)/2 = 0 with z = e^(gamma S).
/// Throws OutsidePhysicalDomain when the discriminant is negative.
double rigid_G_closed_form(const RigidBodyParams& rp, const Vec3& omega,
                           double T);
double rigid_entropy_from_omega_T(const RigidBodyParams& rp, const Vec3& omega,
                                  double T);

// Field adapters: the same closed forms emitted through the autodiff tape,
// consumed by the integrators and the training losses.
PhaseHamiltonian piston_hamiltonian_field(const PistonParams& p);
ForceField piston_force_field(const PistonParams& p);
GField piston_gfield(const PistonParams& p);

ReducedHamiltonian rigid_hamiltonian_field(const RigidBodyParams& rp);
ReducedForceField rigid_force_field(const RigidBodyParams& rp);
ReducedGField rigid_gfield(const RigidBodyParams& rp);

/// High-accuracy reference solution of the continuous phase-space dynamics
/// q-dot = dH/dp, p-dot = -dH/dq + sum_i F^(i), T_i S-dot_i = -F^(i) . v,
/// at the requested grid times.
std::vector<PhaseState> reference_integrate(const PhaseHamiltonian& H,
                                            const ForceField& f,
                                            const PhaseState& y0,
                                            std::span<const double> t_grid,
                                            double rel_tol = 1e-10,
                                            double abs_tol = 1e-12);

/// Reduced reference: mu-dot = mu x Omega + f(Omega, T), T S-dot = -Omega . f.
std::vector<ReducedPhase> reference_integrate(const ReducedHamiltonian& h,
                                              const ReducedForceField& f,
                                              const ReducedPhase& y0,
                                              std::span<const double> t_grid,
                                              double rel_tol = 1e-10,
                                              double abs_tol = 1e-12);

}  // namespace thermo::systems
