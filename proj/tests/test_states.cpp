#include "doctest.h"
#include "thermolearn/states.hpp"

using namespace thermo;

namespace {

ObservableState obs1(double q, double v, double T1, double T2) {
  return ObservableState{{q}, {v}, {T1, T2}};
}

TrajectoryDataset tiny_dataset() {
  TrajectoryDataset d;
  d.meta.n_q = 1;
  d.meta.P = 2;
  d.pairs.push_back(
      {0, 0.1, obs1(0.0, 1.0, 0.9, 0.8), obs1(0.1, 1.0, 0.91, 0.81)});
  return d;
}

}  // namespace

TEST_CASE("checked construction enforces temperature positivity") {
  CHECK_NOTHROW(ObservableState::checked({0.0}, {1.0}, {0.5}));
  CHECK_THROWS_AS(ObservableState::checked({0.0}, {1.0}, {0.0}),
                  NonpositiveTemperature);
  CHECK_THROWS_AS(ObservableState::checked({0.0}, {1.0}, {0.5, -1.0}),
                  NonpositiveTemperature);
  CHECK_THROWS_AS(ObservableState::checked({0.0}, {1.0, 2.0}, {0.5}),
                  ArityMismatch);
  CHECK_THROWS_AS(ReducedObservable::checked({1, 0, 0}, -0.1),
                  NonpositiveTemperature);
}

TEST_CASE("validate_dataset: clean single pair") {
  CHECK(validate_dataset(tiny_dataset()).empty());
}

TEST_CASE("validate_dataset flags nonpositive temperature with its index") {
  auto d = tiny_dataset();
  d.pairs.push_back(
      {1, 0.1, obs1(0.0, 1.0, 0.9, 0.0), obs1(0.1, 1.0, 0.9, 0.8)});
  auto v = validate_dataset(d);
  REQUIRE(v.size() == 1);
  CHECK(v[0].pair_index == 1);
  CHECK(v[0].rule.find("nonpositive temperature") != std::string::npos);
}

TEST_CASE("validate_dataset flags nonpositive h") {
  auto d = tiny_dataset();
  d.pairs[0].h = 0.0;
  auto v = validate_dataset(d);
  REQUIRE(v.size() == 1);
  CHECK(v[0].rule.find("h must be > 0") != std::string::npos);
}

TEST_CASE("validate_dataset flags a broken chain inside one trajectory") {
  auto d = tiny_dataset();
  // Same trajectory id, but the start does not match the previous end.
  d.pairs.push_back(
      {0, 0.1, obs1(0.5, 1.0, 0.91, 0.81), obs1(0.6, 1.0, 0.92, 0.82)});
  auto v = validate_dataset(d);
  REQUIRE(v.size() == 1);
  CHECK(v[0].pair_index == 1);
  CHECK(v[0].rule.find("chain") != std::string::npos);
  // A new trajectory id may start anywhere.
  d.pairs[1].traj_id = 7;
  CHECK(validate_dataset(d).empty());
}

TEST_CASE("reduced/flat embedding round trip") {
  ReducedObservable r{{0.5, -0.25, -0.1667}, 1.229};
  auto flat = to_observable(r);
  CHECK(flat.q.empty());
  CHECK(flat.v.size() == 3);
  auto back = to_reduced(flat);
  CHECK(back.omega == r.omega);
  CHECK(back.T == r.T);
}
