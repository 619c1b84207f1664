#include "thermolearn/systems.hpp"

#include <cmath>
#include <string>

namespace thermo::systems {

using ad::Tape;
using ad::Var;

namespace {

template <class S>
S sackur_tetrode_t(const S& entropy, const S& volume, double NkB,
                   double c_hat) {
  using ad::exp;
  using ad::log;
  if (!(ad::value_of(volume) > 0.0))
    throw NonpositiveVolume("sackur_tetrode_U: V = " +
                            std::to_string(ad::value_of(volume)));
  return exp((-2.0 / 3.0) * log(c_hat * volume) + entropy * (1.0 / NkB));
}

template <class S>
S piston_h_t(const PistonParams& p, const S& x, const S& momentum,
             const S& S1, const S& S2) {
  if (!(std::fabs(ad::value_of(x)) < p.L))
    throw PistonOutOfRange("piston: |x| = " +
                           std::to_string(std::fabs(ad::value_of(x))) +
                           " >= L = " + std::to_string(p.L));
  S v1 = p.A1 * (x + p.L);
  S v2 = p.A2 * (p.L - x);
  return momentum * momentum * (0.5 / p.m) +
         sackur_tetrode_t<S>(S1, v1, p.NkB, p.c_hat) +
         sackur_tetrode_t<S>(S2, v2, p.NkB, p.c_hat);
}

// Legendre transform of the piston Hamiltonian in closed form:
// G = m v^2 / 2 + sum_i NkB T_i (log(NkB T_i) + (2/3) log(c V_i) - 1).
template <class S>
S piston_g_t(const PistonParams& p, const S& x, const S& v, const S& T1,
             const S& T2) {
  using ad::log;
  if (!(std::fabs(ad::value_of(x)) < p.L))
    throw PistonOutOfRange("piston G: |x| >= L");
  S v1 = p.A1 * (x + p.L);
  S v2 = p.A2 * (p.L - x);
  S g1 = p.NkB * T1 *
         (log(p.NkB * T1) + (2.0 / 3.0) * log(p.c_hat * v1) - 1.0);
  S g2 = p.NkB * T2 *
         (log(p.NkB * T2) + (2.0 / 3.0) * log(p.c_hat * v2) - 1.0);
  return 0.5 * p.m * (v * v) + g1 + g2;
}

template <class S>
S piston_lambda_t(const PistonParams& p, int i, const S& v, const S& Ti) {
  return p.nu[i] + p.kappa[i] * (v * v) * (1.0 + 0.1 * (Ti * Ti));
}

template <class S>
S rigid_h_t(const RigidBodyParams& rp, std::span<const S> mu, const S& ent) {
  using ad::exp;
  S kin = mu[0] * mu[0] * (0.5 / rp.inertia[0]) +
          mu[1] * mu[1] * (0.5 / rp.inertia[1]) +
          mu[2] * mu[2] * (0.5 / rp.inertia[2]);
  return exp(rp.gamma * ent) * (kin + rp.U0);
}

template <class S>
std::array<S, 3> rigid_friction_t(const RigidBodyParams& rp,
                                  std::span<const S> omega) {
  using ad::tanh;
  std::array<S, 3> ax{
      rp.Amix[0][0] * omega[0] + rp.Amix[0][1] * omega[1] +
          rp.Amix[0][2] * omega[2],
      rp.Amix[1][0] * omega[0] + rp.Amix[1][1] * omega[1] +
          rp.Amix[1][2] * omega[2],
      rp.Amix[2][0] * omega[0] + rp.Amix[2][1] * omega[1] +
          rp.Amix[2][2] * omega[2]};
  std::array<S, 3> th{tanh(ax[0]), tanh(ax[1]), tanh(ax[2])};
  std::array<S, 3> f{};
  for (int i = 0; i < 3; ++i) {
    S mix = rp.Amix[0][i] * th[0] + rp.Amix[1][i] * th[1] +
            rp.Amix[2][i] * th[2];  // A^T tanh(A Omega)
    f[i] = -(rp.nu0 * omega[i]) - rp.nu1 * mix;
  }
  return f;
}

template <class S>
S rigid_entropy_t(const RigidBodyParams& rp, std::span<const S> omega,
                  const S& T) {
  using ad::log;
  using ad::sqrt;
  S iww = rp.inertia[0] * omega[0] * omega[0] +
          rp.inertia[1] * omega[1] * omega[1] +
          rp.inertia[2] * omega[2] * omega[2];
  S t_over_gamma = T * (1.0 / rp.gamma);
  S disc = t_over_gamma * t_over_gamma - (2.0 * rp.U0) * iww;
  if (ad::value_of(disc) < 0.0)
    throw OutsidePhysicalDomain(
        "rigid G: (T/gamma)^2 - 2 U0 (Omega . I Omega) = " +
        std::to_string(ad::value_of(disc)) + " < 0");
  S z = (t_over_gamma + sqrt(disc)) * (0.5 / rp.U0);  // e^(gamma S), + root
  return log(z) * (1.0 / rp.gamma);
}

template <class S>
S rigid_g_t(const RigidBodyParams& rp, std::span<const S> omega, const S& T) {
  using ad::exp;
  S ent = rigid_entropy_t<S>(rp, omega, T);
  S iww = rp.inertia[0] * omega[0] * omega[0] +
          rp.inertia[1] * omega[1] * omega[1] +
          rp.inertia[2] * omega[2] * omega[2];
  return exp(-rp.gamma * ent) * iww + T * ent - T * (1.0 / rp.gamma);
}

}  // namespace

double sackur_tetrode_U(double S, double V, double NkB, double c_hat) {
  return sackur_tetrode_t<double>(S, V, NkB, c_hat);
}

double piston_hamiltonian(const PistonParams& p, const PhaseState& s) {
  return piston_h_t<double>(p, s.q[0], s.p[0], s.S[0], s.S[1]);
}

std::vector<Vec> piston_forces(const PistonParams& p,
                               const ObservableState& obs) {
  const double v = obs.v[0];
  std::vector<Vec> out;
  for (int i = 0; i < 2; ++i) {
    if (!(obs.T[i] > 0.0))
      throw NonpositiveTemperature("piston_forces: T must be > 0");
    out.push_back({-piston_lambda_t<double>(p, i, v, obs.T[i]) * v});
  }
  return out;
}

double rigid_hamiltonian(const RigidBodyParams& rp, const Vec3& mu, double S) {
  return rigid_h_t<double>(rp, std::span<const double>(mu), S);
}

Vec3 rigid_friction(const RigidBodyParams& rp, const Vec3& omega,
                    double /*T*/) {
  auto f = rigid_friction_t<double>(rp, std::span<const double>(omega));
  return {f[0], f[1], f[2]};
}

double rigid_G_closed_form(const RigidBodyParams& rp, const Vec3& omega,
                           double T) {
  return rigid_g_t<double>(rp, std::span<const double>(omega), T);
}

double rigid_entropy_from_omega_T(const RigidBodyParams& rp,
                                  const Vec3& omega, double T) {
  return rigid_entropy_t<double>(rp, std::span<const double>(omega), T);
}

PhaseHamiltonian piston_hamiltonian_field(const PistonParams& p) {
  PhaseHamiltonian H;
  H.n_q = 1;
  H.P = 2;
  H.emit = [p](Tape&, std::span<const Var> q, std::span<const Var> pp,
               std::span<const Var> S) -> Var {
    return piston_h_t<Var>(p, q[0], pp[0], S[0], S[1]);
  };
  return H;
}

ForceField piston_force_field(const PistonParams& p) {
  ForceField f;
  f.n_q = 1;
  f.P = 2;
  f.emit_channel = [p](Tape&, int channel, std::span<const Var> /*q*/,
                       std::span<const Var> v,
                       std::span<const Var> T) -> std::vector<Var> {
    Var lambda = piston_lambda_t<Var>(p, channel, v[0], T[channel]);
    return {-(lambda * v[0])};
  };
  return f;
}

GField piston_gfield(const PistonParams& p) {
  GField g;
  g.n_q = 1;
  g.P = 2;
  g.emit = [p](Tape&, std::span<const Var> q, std::span<const Var> v,
               std::span<const Var> T) -> Var {
    return piston_g_t<Var>(p, q[0], v[0], T[0], T[1]);
  };
  return g;
}

ReducedHamiltonian rigid_hamiltonian_field(const RigidBodyParams& rp) {
  ReducedHamiltonian h;
  h.emit = [rp](Tape&, std::span<const Var> mu, Var S) -> Var {
    return rigid_h_t<Var>(rp, mu, S);
  };
  return h;
}

ReducedForceField rigid_force_field(const RigidBodyParams& rp) {
  ReducedForceField f;
  f.emit = [rp](Tape&, std::span<const Var> omega,
                Var /*T*/) -> std::array<Var, 3> {
    return rigid_friction_t<Var>(rp, omega);
  };
  return f;
}

ReducedGField rigid_gfield(const RigidBodyParams& rp) {
  ReducedGField g;
  g.emit = [rp](Tape&, std::span<const Var> omega, Var T) -> Var {
    return rigid_g_t<Var>(rp, omega, T);
  };
  return g;
}

std::vector<PhaseState> reference_integrate(const PhaseHamiltonian& H,
                                            const ForceField& f,
                                            const PhaseState& y0,
                                            std::span<const double> t_grid,
                                            double rel_tol, double abs_tol) {
  const std::size_t nq = y0.q.size();
  const std::size_t P = y0.S.size();

  ode::Rhs rhs = [&](double /*t*/, std::span<const double> y,
                     std::span<double> dy) {
    Tape tape;
    auto q = tape.leaves(y.subspan(0, nq));
    auto p = tape.leaves(y.subspan(nq, nq));
    auto S = tape.leaves(y.subspan(2 * nq, P));
    Var Hv = H.emit(tape, q, p, S);
    std::vector<Var> wrt;
    wrt.insert(wrt.end(), q.begin(), q.end());
    wrt.insert(wrt.end(), p.begin(), p.end());
    wrt.insert(wrt.end(), S.begin(), S.end());
    Vec grads = tape.gradient_values(Hv, wrt);

    Vec v(grads.begin() + nq, grads.begin() + 2 * nq);
    Vec T(grads.begin() + 2 * nq, grads.end());
    for (double t : T)
      if (!(t > 0.0))
        throw NonpositiveTemperature("reference_integrate: dH/dS <= 0");
    Vec qvals(y.begin(), y.begin() + nq);
    auto forces = eval_forces(f, ObservableState{qvals, v, T});

    for (std::size_t j = 0; j < nq; ++j) {
      dy[j] = v[j];  // q-dot = dH/dp
      double sum_f = 0.0;
      for (std::size_t i = 0; i < P; ++i) sum_f += forces[i][j];
      dy[nq + j] = -grads[j] + sum_f;
    }
    for (std::size_t i = 0; i < P; ++i)
      dy[2 * nq + i] = -dot(forces[i], v) / T[i];
  };

  Vec y0_flat;
  y0_flat.insert(y0_flat.end(), y0.q.begin(), y0.q.end());
  y0_flat.insert(y0_flat.end(), y0.p.begin(), y0.p.end());
  y0_flat.insert(y0_flat.end(), y0.S.begin(), y0.S.end());

  ode::OdeOptions opts;
  opts.rel_tol = rel_tol;
  opts.abs_tol = abs_tol;
  auto states = ode::integrate(rhs, y0_flat, t_grid, opts);

  std::vector<PhaseState> out;
  out.reserve(states.size());
  for (const Vec& y : states) {
    PhaseState s;
    s.q.assign(y.begin(), y.begin() + nq);
    s.p.assign(y.begin() + nq, y.begin() + 2 * nq);
    s.S.assign(y.begin() + 2 * nq, y.end());
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ReducedPhase> reference_integrate(const ReducedHamiltonian& h,
                                              const ReducedForceField& f,
                                              const ReducedPhase& y0,
                                              std::span<const double> t_grid,
                                              double rel_tol, double abs_tol) {
  ode::Rhs rhs = [&](double /*t*/, std::span<const double> y,
                     std::span<double> dy) {
    Tape tape;
    auto mu = tape.leaves(y.subspan(0, 3));
    Var S = tape.leaf(y[3]);
    Var Hv = h.emit(tape, mu, S);
    std::vector<Var> wrt(mu.begin(), mu.end());
    wrt.push_back(S);
    Vec grads = tape.gradient_values(Hv, wrt);
    Vec3 omega{grads[0], grads[1], grads[2]};
    const double T = grads[3];
    if (!(T > 0.0))
      throw NonpositiveTemperature("reference_integrate: dh/dS <= 0");

    auto omega_vars = tape.leaves(omega);
    auto fv = f.emit(tape, omega_vars, tape.leaf(T));
    Vec3 fr{tape.value(fv[0]), tape.value(fv[1]), tape.value(fv[2])};

    Vec3 muv{y[0], y[1], y[2]};
    Vec3 mu_dot = cross(muv, omega);
    for (int i = 0; i < 3; ++i) dy[i] = mu_dot[i] + fr[i];
    dy[3] = -dot3(omega, fr) / T;
  };

  Vec y0_flat{y0.mu[0], y0.mu[1], y0.mu[2], y0.S};
  ode::OdeOptions opts;
  opts.rel_tol = rel_tol;
  opts.abs_tol = abs_tol;
  auto states = ode::integrate(rhs, y0_flat, t_grid, opts);

  std::vector<ReducedPhase> out;
  out.reserve(states.size());
  for (const Vec& y : states)
    out.push_back(ReducedPhase{{y[0], y[1], y[2]}, y[3]});
  return out;
}

}  // namespace thermo::systems
