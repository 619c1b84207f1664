#include "thermolearn/simulate.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "thermolearn/dataset_io.hpp"

namespace thermo::sim {

namespace {

void push_thermal_diag(const GField& g, const ObservableState& s,
                       Trajectory& out) {
  GEval e = eval_gfield(g, s);
  double energy = -e.G;
  for (std::size_t i = 0; i < s.v.size(); ++i) energy += e.dG_dv[i] * s.v[i];
  for (std::size_t i = 0; i < s.T.size(); ++i) energy += e.dG_dT[i] * s.T[i];
  out.states.push_back(s);
  out.energy.push_back(energy);
  out.entropy.push_back(e.dG_dT);
  out.momentum.push_back(e.dG_dv);
}

void push_reduced_diag(const ReducedGField& g, const ReducedObservable& s,
                       Trajectory& out) {
  ad::Tape tape;
  auto omega = tape.leaves(s.omega);
  ad::Var T = tape.leaf(s.T);
  ad::Var G = g.emit(tape, omega, T);
  std::vector<ad::Var> wrt(omega.begin(), omega.end());
  wrt.push_back(T);
  Vec grads = tape.gradient_values(G, wrt);
  double energy = grads[3] * s.T - tape.value(G);
  for (int i = 0; i < 3; ++i) energy += grads[i] * s.omega[i];
  out.states.push_back(to_observable(s));
  out.energy.push_back(energy);
  out.entropy.push_back({grads[3]});
  out.momentum.push_back({grads[0], grads[1], grads[2]});
}

}  // namespace

Trajectory simulate_thermal(const GField& g, const ForceField& f,
                            const ObservableState& init, int steps, double h,
                            const integrators::StepOptions& opts) {
  Trajectory out;
  out.kind = StateKind::kThermal;
  out.h = h;
  ObservableState s = init;
  push_thermal_diag(g, s, out);
  for (int k = 0; k < steps; ++k) {
    try {
      s = integrators::step_thermal(g, f, s, h, opts);
    } catch (const NewtonDiverged& e) {
      throw NewtonDiverged("step " + std::to_string(k + 1) + ": " + e.what(),
                           e.residual_inf, e.iterations);
    }
    push_thermal_diag(g, s, out);
  }
  return out;
}

Trajectory simulate_reduced(const ReducedGField& g,
                            const ReducedForceField& f,
                            const ReducedObservable& init, int steps, double h,
                            const integrators::StepOptions& opts) {
  Trajectory out;
  out.kind = StateKind::kReduced;
  out.h = h;
  ReducedObservable s = init;
  push_reduced_diag(g, s, out);
  for (int k = 0; k < steps; ++k) {
    try {
      s = integrators::step_so3(g, f, s, h, opts);
    } catch (const NewtonDiverged& e) {
      throw NewtonDiverged("step " + std::to_string(k + 1) + ": " + e.what(),
                           e.residual_inf, e.iterations);
    }
    push_reduced_diag(g, s, out);
  }
  return out;
}

void write_trajectory_csv(const Trajectory& t, const std::string& path) {
  std::ofstream csv(path);
  if (!csv) throw std::runtime_error("cannot write " + path);
  const std::size_t nq = t.states.empty() ? 0 : t.states.front().q.size();
  const std::size_t nv = t.states.empty() ? 0 : t.states.front().v.size();
  const std::size_t P = t.states.empty() ? 0 : t.states.front().T.size();

  std::string header = "step,t";
  for (std::size_t j = 1; j <= nq; ++j) header += ",q_" + std::to_string(j);
  for (std::size_t j = 1; j <= nv; ++j) header += ",v_" + std::to_string(j);
  for (std::size_t j = 1; j <= P; ++j) header += ",T_" + std::to_string(j);
  header += ",E";
  for (std::size_t j = 1; j <= P; ++j) header += ",S_" + std::to_string(j);
  for (std::size_t j = 1; j <= nv; ++j) header += ",p_" + std::to_string(j);
  csv << header << "\n";

  for (std::size_t k = 0; k < t.states.size(); ++k) {
    const auto& s = t.states[k];
    csv << k << "," << io::format_double(t.h * static_cast<double>(k));
    for (double x : s.q) csv << "," << io::format_double(x);
    for (double x : s.v) csv << "," << io::format_double(x);
    for (double x : s.T) csv << "," << io::format_double(x);
    csv << "," << io::format_double(t.energy[k]);
    for (double x : t.entropy[k]) csv << "," << io::format_double(x);
    for (double x : t.momentum[k]) csv << "," << io::format_double(x);
    csv << "\n";
  }
}

Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream csv(path);
  if (!csv) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(csv, line))
    throw std::runtime_error("empty trajectory CSV: " + path);

  // Column counts are recovered from the header names.
  std::size_t nq = 0, nv = 0, P = 0;
  {
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) {
      if (col.rfind("q_", 0) == 0) ++nq;
      else if (col.rfind("v_", 0) == 0) ++nv;
      else if (col.rfind("T_", 0) == 0) ++P;
    }
  }

  Trajectory t;
  t.kind = (nq == 0 && nv == 3) ? StateKind::kReduced : StateKind::kThermal;
  double t1 = 0.0;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    Vec row;
    while (std::getline(ss, field, ',')) row.push_back(std::stod(field));
    if (row.size() != 2 + nq + 2 * nv + 2 * P + 1)
      throw std::runtime_error("bad trajectory row width in " + path);
    std::size_t k = 1;
    if (t.states.size() == 1) t1 = row[k];
    ++k;
    ObservableState s;
    for (std::size_t j = 0; j < nq; ++j) s.q.push_back(row[k++]);
    for (std::size_t j = 0; j < nv; ++j) s.v.push_back(row[k++]);
    for (std::size_t j = 0; j < P; ++j) s.T.push_back(row[k++]);
    t.states.push_back(std::move(s));
    t.energy.push_back(row[k++]);
    Vec S(P), p(nv);
    for (std::size_t j = 0; j < P; ++j) S[j] = row[k++];
    for (std::size_t j = 0; j < nv; ++j) p[j] = row[k++];
    t.entropy.push_back(std::move(S));
    t.momentum.push_back(std::move(p));
  }
  t.h = t.states.size() > 1 ? t1 : 0.0;
  return t;
}

Metrics evaluate(const Trajectory& traj, const Trajectory& ref) {
  if (traj.states.size() != ref.states.size())
    throw GridMismatch("evaluate: trajectories have different lengths");
  if (!traj.states.empty() &&
      std::fabs(traj.h - ref.h) > 1e-12 * std::max(1.0, std::fabs(ref.h)))
    throw GridMismatch("evaluate: trajectories have different step sizes");

  Metrics m;
  m.steps = static_cast<int>(traj.states.size()) - 1;
  if (traj.states.empty()) return m;

  const auto& s0 = traj.states.front();
  const std::size_t nq = s0.q.size(), nv = s0.v.size(), P = s0.T.size();
  const auto& r0 = ref.states.front();
  if (r0.q.size() != nq || r0.v.size() != nv || r0.T.size() != P)
    throw GridMismatch("evaluate: trajectories have different state layouts");

  m.mae.assign(nq + nv + P, 0.0);
  for (std::size_t j = 1; j <= nq; ++j)
    m.mae_columns.push_back("q_" + std::to_string(j));
  for (std::size_t j = 1; j <= nv; ++j)
    m.mae_columns.push_back("v_" + std::to_string(j));
  for (std::size_t j = 1; j <= P; ++j)
    m.mae_columns.push_back("T_" + std::to_string(j));

  const std::size_t n = traj.states.size();
  for (std::size_t k = 0; k < n; ++k) {
    const auto& a = traj.states[k];
    const auto& b = ref.states[k];
    std::size_t col = 0;
    for (std::size_t j = 0; j < nq; ++j)
      m.mae[col++] += std::fabs(a.q[j] - b.q[j]);
    for (std::size_t j = 0; j < nv; ++j)
      m.mae[col++] += std::fabs(a.v[j] - b.v[j]);
    for (std::size_t j = 0; j < P; ++j)
      m.mae[col++] += std::fabs(a.T[j] - b.T[j]);
  }
  for (double& x : m.mae) x /= static_cast<double>(n);

  for (std::size_t k = 0; k < n; ++k) {
    m.energy_drift = std::max(
        m.energy_drift, std::fabs(traj.energy[k] - traj.energy.front()));
    m.energy_drift_vs_ref =
        std::max(m.energy_drift_vs_ref,
                 std::fabs(traj.energy[k] - ref.energy[k]));
  }

  // Non-observables are defined up to the affine gauge: align final points.
  m.nonobservable_mae.assign(P + nv, 0.0);
  Vec s_shift(P), p_shift(nv);
  for (std::size_t j = 0; j < P; ++j)
    s_shift[j] = traj.entropy.back()[j] - ref.entropy.back()[j];
  for (std::size_t j = 0; j < nv; ++j)
    p_shift[j] = traj.momentum.back()[j] - ref.momentum.back()[j];
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < P; ++j)
      m.nonobservable_mae[j] +=
          std::fabs(traj.entropy[k][j] - s_shift[j] - ref.entropy[k][j]);
    for (std::size_t j = 0; j < nv; ++j)
      m.nonobservable_mae[P + j] +=
          std::fabs(traj.momentum[k][j] - p_shift[j] - ref.momentum[k][j]);
  }
  for (double& x : m.nonobservable_mae) x /= static_cast<double>(n);

  for (std::size_t k = 1; k < n; ++k) {
    for (std::size_t j = 0; j < P; ++j) {
      if (traj.entropy[k][j] - traj.entropy[k - 1][j] < -1e-12) {
        ++m.entropy_violations;
        break;
      }
    }
  }
  return m;
}

std::string metrics_to_json(const Metrics& m) {
  nlohmann::json j;
  for (std::size_t i = 0; i < m.mae.size(); ++i)
    j["mae"][m.mae_columns[i]] = m.mae[i];
  j["energy_drift"] = m.energy_drift;
  j["energy_drift_vs_ref"] = m.energy_drift_vs_ref;
  j["nonobservable_mae_endpoint_aligned"] = m.nonobservable_mae;
  j["entropy_violations"] = m.entropy_violations;
  j["steps"] = m.steps;
  return j.dump(2);
}

}  // namespace thermo::sim
