#include "thermolearn/states.hpp"

#include <cmath>

namespace thermo {

namespace {
bool all_finite(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}
}  // namespace

ObservableState ObservableState::checked(Vec q, Vec v, Vec T) {
  if (q.size() != v.size())
    throw ArityMismatch("ObservableState: q and v dimensions differ");
  if (T.empty()) throw ArityMismatch("ObservableState: need P >= 1");
  for (double t : T)
    if (!(t > 0.0))
      throw NonpositiveTemperature("ObservableState: T must be > 0, got " +
                                   std::to_string(t));
  return ObservableState{std::move(q), std::move(v), std::move(T)};
}

ReducedObservable ReducedObservable::checked(Vec3 omega, double T) {
  if (!(T > 0.0))
    throw NonpositiveTemperature("ReducedObservable: T must be > 0, got " +
                                 std::to_string(T));
  return ReducedObservable{omega, T};
}

ObservableState to_observable(const ReducedObservable& r) {
  return ObservableState{{}, {r.omega[0], r.omega[1], r.omega[2]}, {r.T}};
}

ReducedObservable to_reduced(const ObservableState& s) {
  if (!s.q.empty() || s.v.size() != 3 || s.T.size() != 1)
    throw ArityMismatch("to_reduced: expected (n_q=0, |v|=3, P=1) layout");
  return ReducedObservable{{s.v[0], s.v[1], s.v[2]}, s.T[0]};
}

std::vector<DatasetViolation> validate_dataset(const TrajectoryDataset& d) {
  std::vector<DatasetViolation> out;
  if (d.pairs.empty()) return out;

  // Velocity dimension is tracked separately: reduced states carry Omega in
  // v with no q columns at all.
  const std::size_t nq = d.pairs.front().start.q.size();
  const std::size_t nv = d.pairs.front().start.v.size();
  const std::size_t np = d.pairs.front().start.T.size();

  auto check_state = [&](int idx, const ObservableState& s,
                         const char* which) {
    if (s.q.size() != nq || s.v.size() != nv || s.T.size() != np)
      out.push_back({idx, std::string(which) + ": dimension mismatch"});
    for (double t : s.T)
      if (!(t > 0.0))
        out.push_back({idx, std::string(which) + ": nonpositive temperature"});
    if (!all_finite(s.q) || !all_finite(s.v) || !all_finite(s.T))
      out.push_back({idx, std::string(which) + ": nonfinite entry"});
  };

  int prev_traj = -1;
  const ObservableState* prev_end = nullptr;
  for (std::size_t k = 0; k < d.pairs.size(); ++k) {
    const auto& pair = d.pairs[k];
    const int idx = static_cast<int>(k);
    if (!(pair.h > 0.0)) out.push_back({idx, "h must be > 0"});
    check_state(idx, pair.start, "start");
    check_state(idx, pair.end, "end");

    // Pairs of one trajectory must chain end-to-start exactly.
    if (pair.traj_id == prev_traj && prev_end != nullptr) {
      const auto& e = *prev_end;
      bool chained = e.q == pair.start.q && e.v == pair.start.v &&
                     e.T == pair.start.T;
      if (!chained) out.push_back({idx, "broken end-to-start chain"});
    }
    prev_traj = pair.traj_id;
    prev_end = &pair.end;
  }
  return out;
}

}  // namespace thermo
