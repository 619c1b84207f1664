#include "thermolearn/fields.hpp"

#include <string>

namespace thermo {

using ad::Tape;
using ad::Var;

ObservableState observable_from_phase(const PhaseHamiltonian& H,
                                      const PhaseState& s) {
  Tape tape;
  auto q = tape.leaves(s.q);
  auto p = tape.leaves(s.p);
  auto S = tape.leaves(s.S);
  Var h = H.emit(tape, q, p, S);

  std::vector<Var> wrt;
  wrt.insert(wrt.end(), p.begin(), p.end());
  wrt.insert(wrt.end(), S.begin(), S.end());
  Vec grads = tape.gradient_values(h, wrt);

  Vec v(grads.begin(), grads.begin() + p.size());
  Vec T(grads.begin() + p.size(), grads.end());
  for (double t : T)
    if (!(t > 0.0))
      throw NonpositiveTemperature(
          "observable_from_phase: dH/dS = " + std::to_string(t) +
          " <= 0; phase point outside the physical domain");
  return ObservableState{s.q, std::move(v), std::move(T)};
}

ReducedObservable observable_from_phase(const ReducedHamiltonian& h,
                                        const ReducedPhase& s) {
  Tape tape;
  auto mu = tape.leaves(s.mu);
  Var S = tape.leaf(s.S);
  Var H = h.emit(tape, mu, S);
  std::vector<Var> wrt(mu.begin(), mu.end());
  wrt.push_back(S);
  Vec grads = tape.gradient_values(H, wrt);
  const double T = grads[3];
  if (!(T > 0.0))
    throw NonpositiveTemperature("observable_from_phase: dH/dS = " +
                                 std::to_string(T) + " <= 0");
  return ReducedObservable{{grads[0], grads[1], grads[2]}, T};
}

GEval eval_gfield(const GField& g, const ObservableState& s) {
  Tape tape;
  auto q = tape.leaves(s.q);
  auto v = tape.leaves(s.v);
  auto T = tape.leaves(s.T);
  Var G = g.emit(tape, q, v, T);

  std::vector<Var> wrt;
  wrt.insert(wrt.end(), q.begin(), q.end());
  wrt.insert(wrt.end(), v.begin(), v.end());
  wrt.insert(wrt.end(), T.begin(), T.end());
  Vec grads = tape.gradient_values(G, wrt);

  GEval out;
  out.G = tape.value(G);
  out.dG_dq.assign(grads.begin(), grads.begin() + q.size());
  out.dG_dv.assign(grads.begin() + q.size(), grads.begin() + 2 * q.size());
  out.dG_dT.assign(grads.begin() + 2 * q.size(), grads.end());
  return out;
}

std::vector<Vec> eval_forces(const ForceField& f, const ObservableState& s) {
  Tape tape;
  auto q = tape.leaves(s.q);
  auto v = tape.leaves(s.v);
  auto T = tape.leaves(s.T);
  std::vector<Vec> out;
  out.reserve(f.P);
  for (int i = 0; i < f.P; ++i) {
    auto fi = f.emit_channel(tape, i, q, v, T);
    Vec vals;
    vals.reserve(fi.size());
    for (Var x : fi) vals.push_back(tape.value(x));
    out.push_back(std::move(vals));
  }
  return out;
}

double energy_observable(const GField& g, const ObservableState& s) {
  GEval e = eval_gfield(g, s);
  double energy = -e.G;
  for (std::size_t i = 0; i < s.v.size(); ++i) energy += e.dG_dv[i] * s.v[i];
  for (std::size_t i = 0; i < s.T.size(); ++i) energy += e.dG_dT[i] * s.T[i];
  return energy;
}

double energy_observable(const ReducedGField& g, const ReducedObservable& s) {
  Tape tape;
  auto omega = tape.leaves(s.omega);
  Var T = tape.leaf(s.T);
  Var G = g.emit(tape, omega, T);
  std::vector<Var> wrt(omega.begin(), omega.end());
  wrt.push_back(T);
  Vec grads = tape.gradient_values(G, wrt);
  return grads[0] * s.omega[0] + grads[1] * s.omega[1] +
         grads[2] * s.omega[2] + grads[3] * s.T - tape.value(G);
}

GField make_mlp_gfield(nets::MlpModel net, int n_q, int P) {
  GField g;
  g.n_q = n_q;
  g.P = P;
  g.emit = [net = std::move(net)](Tape& tape, std::span<const Var> q,
                                  std::span<const Var> v,
                                  std::span<const Var> T) -> Var {
    std::vector<Var> params;
    params.reserve(net.params.size());
    for (double w : net.params) params.push_back(tape.constant(w));
    std::vector<Var> x;
    x.reserve(q.size() + v.size() + T.size());
    x.insert(x.end(), q.begin(), q.end());
    x.insert(x.end(), v.begin(), v.end());
    x.insert(x.end(), T.begin(), T.end());
    return nets::mlp_forward(tape, net.arch, params, x)[0];
  };
  return g;
}

ForceField make_dissipative_force_field(
    std::vector<nets::DissipativeForceModel> channels, int n_q, int P) {
  ForceField f;
  f.n_q = n_q;
  f.P = P;
  f.emit_channel = [channels = std::move(channels)](
                       Tape& tape, int channel, std::span<const Var> q,
                       std::span<const Var> v,
                       std::span<const Var> T) -> std::vector<Var> {
    const auto& m = channels.at(channel);
    std::vector<Var> params;
    params.reserve(m.net.params.size());
    for (double w : m.net.params) params.push_back(tape.constant(w));
    std::vector<Var> obs;
    obs.reserve(q.size() + v.size() + T.size());
    obs.insert(obs.end(), q.begin(), q.end());
    obs.insert(obs.end(), v.begin(), v.end());
    obs.insert(obs.end(), T.begin(), T.end());
    return nets::dissipative_force(tape, m, params, obs, v);
  };
  return f;
}

ReducedGField make_mlp_reduced_gfield(nets::MlpModel net) {
  ReducedGField g;
  g.emit = [net = std::move(net)](Tape& tape, std::span<const Var> omega,
                                  Var T) -> Var {
    std::vector<Var> params;
    params.reserve(net.params.size());
    for (double w : net.params) params.push_back(tape.constant(w));
    std::vector<Var> x(omega.begin(), omega.end());
    x.push_back(T);
    return nets::mlp_forward(tape, net.arch, params, x)[0];
  };
  return g;
}

ReducedForceField make_dissipative_reduced_force_field(
    nets::DissipativeForceModel model) {
  ReducedForceField f;
  f.emit = [model = std::move(model)](
               Tape& tape, std::span<const Var> omega,
               Var T) -> std::array<Var, 3> {
    std::vector<Var> params;
    params.reserve(model.net.params.size());
    for (double w : model.net.params) params.push_back(tape.constant(w));
    std::vector<Var> obs(omega.begin(), omega.end());
    obs.push_back(T);
    auto fv = nets::dissipative_force(tape, model, params, obs, omega);
    return {fv[0], fv[1], fv[2]};
  };
  return f;
}

}  // namespace thermo
