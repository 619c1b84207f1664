#include "thermolearn/integrators.hpp"

#include <cmath>

namespace thermo::integrators {

using ad::Tape;
using ad::Var;

Mat3 hat(const Vec3& w) {
  return Mat3{{{0.0, -w[2], w[1]}, {w[2], 0.0, -w[0]}, {-w[1], w[0], 0.0}}};
}

Vec3 vee(const Mat3& a) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (std::fabs(a[i][j] + a[j][i]) > 1e-12)
        throw NotSkew("vee: matrix is not antisymmetric to 1e-12");
  return Vec3{a[2][1], a[0][2], a[1][0]};
}

double ResidualReport::max_abs() const {
  double m = norm_inf(r_momentum);
  m = std::max(m, norm_inf(r_entropy));
  m = std::max(m, norm_inf(r_velocity));
  return m;
}

namespace {

struct GPartials {
  std::vector<Var> dG_dq, dG_dv, dG_dT;
};

GPartials g_partials(Tape& tape, const GField& g, const ObsVars& s) {
  Var G = g.emit(tape, s.q, s.v, s.T);
  std::vector<Var> wrt;
  wrt.insert(wrt.end(), s.q.begin(), s.q.end());
  wrt.insert(wrt.end(), s.v.begin(), s.v.end());
  wrt.insert(wrt.end(), s.T.begin(), s.T.end());
  auto grads = tape.gradient(G, wrt);
  GPartials out;
  out.dG_dq.assign(grads.begin(), grads.begin() + s.q.size());
  out.dG_dv.assign(grads.begin() + s.q.size(),
                   grads.begin() + s.q.size() + s.v.size());
  out.dG_dT.assign(grads.begin() + s.q.size() + s.v.size(), grads.end());
  return out;
}

std::vector<std::vector<Var>> all_forces(Tape& tape, const ForceField& f,
                                         const ObsVars& s) {
  std::vector<std::vector<Var>> out;
  out.reserve(f.P);
  for (int i = 0; i < f.P; ++i)
    out.push_back(f.emit_channel(tape, i, s.q, s.v, s.T));
  return out;
}

ObsVars obs_leaves(Tape& tape, const ObservableState& s) {
  return ObsVars{tape.leaves(s.q), tape.leaves(s.v), tape.leaves(s.T)};
}

// Cross product of hat-vector pairs as Vars.
std::array<Var, 3> cross_v(const std::array<Var, 3>& a,
                           const std::array<Var, 3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

Var dot_v(const std::array<Var, 3>& a, const std::array<Var, 3>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

}  // namespace

ThermalResidualVars residuals_thermal_vars(Tape& tape, const GField& g,
                                           const ForceField& f,
                                           const ObsVars& a, const ObsVars& b,
                                           double h,
                                           const ResidualOptions& opts) {
  const std::size_t nq = a.q.size();
  const std::size_t P = a.T.size();
  GPartials ga = g_partials(tape, g, a);
  GPartials gb = g_partials(tape, g, b);
  auto fa = all_forces(tape, f, a);
  auto fb = all_forces(tape, f, b);

  ThermalResidualVars out;
  out.r_velocity.reserve(nq);
  for (std::size_t j = 0; j < nq; ++j)
    out.r_velocity.push_back((b.q[j] - a.q[j]) * (1.0 / h) - a.v[j]);

  // Momentum line: force evaluated at the end point (index k+1).
  out.r_momentum.reserve(nq);
  for (std::size_t j = 0; j < nq; ++j) {
    Var r = (gb.dG_dv[j] - ga.dG_dv[j]) * (1.0 / h) - gb.dG_dq[j];
    for (std::size_t i = 0; i < P; ++i) {
      if (opts.force_midpoint)
        r = r - 0.5 * (fa[i][j] + fb[i][j]);
      else
        r = r - fb[i][j];
    }
    out.r_momentum.push_back(r);
  }

  // Entropy lines: force evaluated at the start point (index k).
  std::vector<Var> v_used(a.v.begin(), a.v.end());
  if (opts.entropy_velocity ==
      ResidualOptions::EntropyVelocity::kFiniteDifference) {
    for (std::size_t j = 0; j < nq; ++j)
      v_used[j] = (b.q[j] - a.q[j]) * (1.0 / h);
  }
  out.r_entropy.reserve(P);
  for (std::size_t i = 0; i < P; ++i) {
    Var r = a.T[i] * ((gb.dG_dT[i] - ga.dG_dT[i]) * (1.0 / h));
    for (std::size_t j = 0; j < nq; ++j) {
      if (opts.force_midpoint)
        r = r + 0.5 * (fa[i][j] + fb[i][j]) * v_used[j];
      else
        r = r + fa[i][j] * v_used[j];
    }
    out.r_entropy.push_back(r);
  }
  return out;
}

ResidualReport residuals_thermal(const GField& g, const ForceField& f,
                                 const ObservableState& a,
                                 const ObservableState& b, double h,
                                 const ResidualOptions& opts) {
  if (!(h > 0.0)) throw std::invalid_argument("residuals_thermal: h <= 0");
  for (double t : a.T)
    if (!(t > 0.0)) throw NonpositiveTemperature("residuals_thermal: T_a");
  for (double t : b.T)
    if (!(t > 0.0)) throw NonpositiveTemperature("residuals_thermal: T_b");

  Tape tape;
  auto av = obs_leaves(tape, a);
  auto bv = obs_leaves(tape, b);
  auto r = residuals_thermal_vars(tape, g, f, av, bv, h, opts);

  ResidualReport rep;
  for (Var x : r.r_momentum) rep.r_momentum.push_back(tape.value(x));
  for (Var x : r.r_entropy) rep.r_entropy.push_back(tape.value(x));
  for (Var x : r.r_velocity) rep.r_velocity.push_back(tape.value(x));
  return rep;
}

So3ResidualVars residuals_so3_vars(Tape& tape, const ReducedGField& g,
                                   const ReducedForceField& f,
                                   std::span<const Var> omega_a, Var T_a,
                                   std::span<const Var> omega_b, Var T_b,
                                   double h, const ResidualOptions& opts) {
  auto partials = [&](std::span<const Var> omega, Var T) {
    Var G = g.emit(tape, omega, T);
    std::vector<Var> wrt(omega.begin(), omega.end());
    wrt.push_back(T);
    auto grads = tape.gradient(G, wrt);
    return std::pair<std::array<Var, 3>, Var>(
        {grads[0], grads[1], grads[2]}, grads[3]);
  };
  auto [mu_a, S_a] = partials(omega_a, T_a);
  auto [mu_b, S_b] = partials(omega_b, T_b);
  auto f_a = f.emit(tape, omega_a, T_a);
  auto f_b = f.emit(tape, omega_b, T_b);

  std::array<Var, 3> oa{omega_a[0], omega_a[1], omega_a[2]};
  std::array<Var, 3> ob{omega_b[0], omega_b[1], omega_b[2]};

  // Signs are fixed so the continuous limit is mu-dot = mu x Omega + f and
  // T S-dot = -Omega . f: dissipative forces then raise the discrete entropy
  // and the one-step error against the reference flow is O(h^2). The
  // opposite sign choice discretizes the time-reversed flow.
  auto ca = cross_v(mu_a, oa);       // mu_a x Omega_a
  auto cb = cross_v(mu_b, ob);
  Var wa = dot_v(oa, mu_a);          // (Omega.mu) Omega from the h/4 term
  Var wb = dot_v(ob, mu_b);

  So3ResidualVars out{{}, tape.constant(0.0)};
  for (int j = 0; j < 3; ++j) {
    Var r = (mu_b[j] - mu_a[j]) * (1.0 / h) - 0.5 * (cb[j] + ca[j]) +
            (h / 4.0) * (wb * ob[j] - wa * oa[j]);
    if (opts.force_midpoint)
      r = r - 0.5 * (f_a[j] + f_b[j]);
    else
      r = r - f_b[j];
    out.r_momentum[j] = r;
  }

  Var power_a = dot_v(oa, f_a);  // Omega_a . f_a
  if (opts.force_midpoint) {
    Var power_b = dot_v(ob, f_b);
    power_a = 0.5 * (power_a + power_b);
  }
  out.r_entropy = (S_b - S_a) * (1.0 / h) + power_a / T_a;
  return out;
}

ResidualReport residuals_so3(const ReducedGField& g,
                             const ReducedForceField& f,
                             const ReducedObservable& a,
                             const ReducedObservable& b, double h,
                             const ResidualOptions& opts) {
  if (!(h > 0.0)) throw std::invalid_argument("residuals_so3: h <= 0");
  if (!(a.T > 0.0) || !(b.T > 0.0))
    throw NonpositiveTemperature("residuals_so3: T must be > 0");

  Tape tape;
  auto oa = tape.leaves(a.omega);
  auto ob = tape.leaves(b.omega);
  Var Ta = tape.leaf(a.T), Tb = tape.leaf(b.T);
  auto r = residuals_so3_vars(tape, g, f, oa, Ta, ob, Tb, h, opts);

  ResidualReport rep;
  for (Var x : r.r_momentum) rep.r_momentum.push_back(tape.value(x));
  rep.r_entropy.push_back(tape.value(r.r_entropy));
  return rep;
}

ObservableState step_thermal(const GField& g, const ForceField& f,
                             const ObservableState& a, double h,
                             const StepOptions& opts) {
  if (!(h > 0.0)) throw std::invalid_argument("step_thermal: h <= 0");
  const std::size_t nq = a.q.size();
  const std::size_t P = a.T.size();

  ObservableState b;
  b.q.resize(nq);
  for (std::size_t j = 0; j < nq; ++j) b.q[j] = a.q[j] + h * a.v[j];

  auto residual = [&](std::span<const double> x,
                      std::span<double> r) -> bool {
    ObservableState trial = b;
    trial.v.assign(x.begin(), x.begin() + nq);
    trial.T.assign(x.begin() + nq, x.end());
    for (double t : trial.T)
      if (!(t > 0.0)) return false;
    try {
      ResidualReport rep =
          residuals_thermal(g, f, a, trial, h, opts.residual);
      for (std::size_t j = 0; j < nq; ++j) r[j] = rep.r_momentum[j];
      for (std::size_t i = 0; i < P; ++i) r[nq + i] = rep.r_entropy[i];
    } catch (const std::domain_error&) {
      return false;
    }
    return true;
  };

  Vec x0(nq + P);
  for (std::size_t j = 0; j < nq; ++j) x0[j] = a.v[j];
  for (std::size_t i = 0; i < P; ++i) x0[nq + i] = a.T[i];

  NewtonResult sol = newton_solve(residual, std::move(x0), opts.newton);
  b.v.assign(sol.x.begin(), sol.x.begin() + nq);
  b.T.assign(sol.x.begin() + nq, sol.x.end());
  return b;
}

ReducedObservable step_so3(const ReducedGField& g, const ReducedForceField& f,
                           const ReducedObservable& a, double h,
                           const StepOptions& opts) {
  if (!(h > 0.0)) throw std::invalid_argument("step_so3: h <= 0");

  auto residual = [&](std::span<const double> x,
                      std::span<double> r) -> bool {
    if (!(x[3] > 0.0)) return false;
    ReducedObservable trial{{x[0], x[1], x[2]}, x[3]};
    try {
      ResidualReport rep = residuals_so3(g, f, a, trial, h, opts.residual);
      for (int j = 0; j < 3; ++j) r[j] = rep.r_momentum[j];
      r[3] = rep.r_entropy[0];
    } catch (const std::domain_error&) {
      return false;
    }
    return true;
  };

  Vec x0{a.omega[0], a.omega[1], a.omega[2], a.T};
  NewtonResult sol = newton_solve(residual, std::move(x0), opts.newton);
  return ReducedObservable{{sol.x[0], sol.x[1], sol.x[2]}, sol.x[3]};
}

PhaseState step_canonical(const PhaseHamiltonian& H, const ForceField& f,
                          const PhaseState& a, double h,
                          const StepOptions& opts) {
  if (!(h > 0.0)) throw std::invalid_argument("step_canonical: h <= 0");
  const std::size_t nq = a.q.size();
  const std::size_t P = a.S.size();

  // Partials of H at (q_k, p_trial, S_k) plus the observable-argument forces.
  struct Eval {
    Vec dH_dq, v, T;
    std::vector<Vec> forces;
  };
  auto evaluate = [&](std::span<const double> p_trial, Eval& e) -> bool {
    try {
      Tape tape;
      auto q = tape.leaves(a.q);
      auto p = tape.leaves(p_trial);
      auto S = tape.leaves(a.S);
      Var Hv = H.emit(tape, q, p, S);
      std::vector<Var> wrt;
      wrt.insert(wrt.end(), q.begin(), q.end());
      wrt.insert(wrt.end(), p.begin(), p.end());
      wrt.insert(wrt.end(), S.begin(), S.end());
      Vec grads = tape.gradient_values(Hv, wrt);
      e.dH_dq.assign(grads.begin(), grads.begin() + nq);
      e.v.assign(grads.begin() + nq, grads.begin() + 2 * nq);
      e.T.assign(grads.begin() + 2 * nq, grads.end());
      for (double t : e.T)
        if (!(t > 0.0)) return false;
      e.forces = eval_forces(f, ObservableState{a.q, e.v, e.T});
    } catch (const std::domain_error&) {
      return false;
    }
    return true;
  };

  auto residual = [&](std::span<const double> x,
                      std::span<double> r) -> bool {
    Eval e;
    if (!evaluate(x, e)) return false;
    for (std::size_t j = 0; j < nq; ++j) {
      double sum_f = 0.0;
      for (std::size_t i = 0; i < P; ++i) sum_f += e.forces[i][j];
      r[j] = (x[j] - a.p[j]) / h + e.dH_dq[j] - sum_f;
    }
    return true;
  };

  NewtonResult sol = newton_solve(residual, a.p, opts.newton);

  Eval e;
  if (!evaluate(sol.x, e))
    throw NewtonDiverged("step_canonical: converged point left the domain",
                         sol.residual_inf, sol.iterations);
  PhaseState b;
  b.p = sol.x;
  b.q.resize(nq);
  for (std::size_t j = 0; j < nq; ++j) b.q[j] = a.q[j] + h * e.v[j];
  b.S.resize(P);
  for (std::size_t i = 0; i < P; ++i) {
    const double power = dot(e.forces[i], e.v);
    b.S[i] = a.S[i] - h * power / e.T[i];
  }
  return b;
}

}  // namespace thermo::integrators
