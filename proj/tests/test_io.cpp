#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "thermolearn/dataset_io.hpp"
#include "thermolearn/model_io.hpp"
#include "thermolearn/rng.hpp"
#include "thermolearn/simulate.hpp"
#include "thermolearn/training.hpp"

using namespace thermo;

namespace {

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "thermolearn_test_io";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("dataset CSV/JSON round trip preserves every bit") {
  training::DatasetSpec spec;
  spec.n_traj = 3;
  spec.traj_len = 4;
  auto d = training::generate_dataset(training::make_system("piston"), spec, 9);

  auto dir = temp_dir();
  const auto csv = (dir / "d.csv").string();
  const auto meta = (dir / "d.json").string();
  io::save_dataset(d, csv, meta);
  auto back = io::load_dataset(csv, meta);

  REQUIRE(back.pairs.size() == d.pairs.size());
  for (std::size_t k = 0; k < d.pairs.size(); ++k) {
    CHECK(back.pairs[k].traj_id == d.pairs[k].traj_id);
    CHECK(back.pairs[k].h == d.pairs[k].h);
    CHECK(back.pairs[k].start.q == d.pairs[k].start.q);
    CHECK(back.pairs[k].start.v == d.pairs[k].start.v);
    CHECK(back.pairs[k].start.T == d.pairs[k].start.T);
    CHECK(back.pairs[k].end.q == d.pairs[k].end.q);
    CHECK(back.pairs[k].end.v == d.pairs[k].end.v);
    CHECK(back.pairs[k].end.T == d.pairs[k].end.T);
  }
  CHECK(back.meta.system == "piston");
  CHECK(back.meta.n_q == 1);
  CHECK(back.meta.P == 2);
  CHECK(validate_dataset(back).empty());
}

TEST_CASE("reduced dataset round trip has zero q columns") {
  training::DatasetSpec spec;
  spec.n_traj = 2;
  spec.traj_len = 3;
  auto d =
      training::generate_dataset(training::make_system("rigid_body"), spec, 4);
  auto dir = temp_dir();
  const auto csv = (dir / "r.csv").string();
  const auto meta = (dir / "r.json").string();
  io::save_dataset(d, csv, meta);
  auto back = io::load_dataset(csv, meta);
  REQUIRE(back.pairs.size() == d.pairs.size());
  CHECK(back.meta.kind == StateKind::kReduced);
  CHECK(back.pairs[0].start.q.empty());
  CHECK(back.pairs[0].start.v == d.pairs[0].start.v);
  CHECK(back.pairs[0].end.T == d.pairs[0].end.T);
}

TEST_CASE("model JSON round trip") {
  Rng rng(77);
  io::StoredModel m;
  m.kind = "dissipative_force";
  m.n = 3;
  m.antisymmetric_part = false;
  nets::MlpArchitecture arch{4, {24, 24, 24}, 6, nets::Activation::kSigmoid};
  m.net = nets::init_mlp(arch, rng);

  auto dir = temp_dir();
  const auto path = (dir / "model.json").string();
  io::save_model(m, path);
  auto back = io::load_model(path);
  CHECK(back.kind == m.kind);
  CHECK(back.n == 3);
  CHECK(back.net.arch.input_dim == 4);
  CHECK(back.net.arch.hidden == std::vector<int>{24, 24, 24});
  CHECK(back.net.params == m.net.params);
  CHECK_NOTHROW(back.as_dissipative());

  SUBCASE("params/arch mismatch is rejected on load") {
    m.net.params.pop_back();
    const auto bad = (dir / "bad.json").string();
    CHECK_THROWS(io::save_model(m, bad), io::load_model(bad));
  }
}

TEST_CASE("format_double round-trips") {
  for (double x : {0.1, -1.0 / 3.0, 1e-17, 123456.789, 0.8951234567890123}) {
    const double back = std::stod(io::format_double(x));
    CHECK(back == x);
  }
}

TEST_CASE("trajectory CSV round trip and self-evaluation") {
  auto sys = training::make_system("piston");
  auto g = sys.exact_gfield();
  auto f = sys.exact_force_field();
  auto H = systems::piston_hamiltonian_field(sys.piston);
  auto init = observable_from_phase(H, PhaseState{{0.5}, {-0.5}, {0.5, 0.5}});
  auto traj = sim::simulate_thermal(g, f, init, 15, 0.1);

  auto dir = temp_dir();
  const auto path = (dir / "traj.csv").string();
  sim::write_trajectory_csv(traj, path);
  auto back = sim::read_trajectory_csv(path);
  REQUIRE(back.states.size() == traj.states.size());
  CHECK(back.h == traj.h);
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    CHECK(back.states[k].q == traj.states[k].q);
    CHECK(back.states[k].v == traj.states[k].v);
    CHECK(back.states[k].T == traj.states[k].T);
    CHECK(back.energy[k] == traj.energy[k]);
    CHECK(back.entropy[k] == traj.entropy[k]);
    CHECK(back.momentum[k] == traj.momentum[k]);
  }

  auto metrics = sim::evaluate(back, back);
  for (double x : metrics.mae) CHECK(x == 0.0);
  CHECK(metrics.entropy_violations == 0);
  CHECK(metrics.energy_drift > 0.0);  // band exists but is small
  CHECK(metrics.energy_drift < 0.02);

  SUBCASE("grid mismatch is rejected") {
    auto shorter = back;
    shorter.states.pop_back();
    shorter.energy.pop_back();
    shorter.entropy.pop_back();
    shorter.momentum.pop_back();
    CHECK_THROWS_AS(sim::evaluate(shorter, back), GridMismatch);
  }
}

TEST_CASE("reduced trajectory round trip") {
  auto sys = training::make_system("rigid_body");
  auto g = sys.exact_reduced_gfield();
  auto f = sys.exact_reduced_force_field();
  auto h = systems::rigid_hamiltonian_field(sys.rigid);
  auto init = observable_from_phase(h, ReducedPhase{{0.5, -0.5, -0.5}, 0.0});
  auto traj = sim::simulate_reduced(g, f, init, 10, 0.1);

  auto dir = temp_dir();
  const auto path = (dir / "rtraj.csv").string();
  sim::write_trajectory_csv(traj, path);
  auto back = sim::read_trajectory_csv(path);
  CHECK(back.kind == StateKind::kReduced);
  REQUIRE(back.states.size() == 11);
  CHECK(back.states[3].v == traj.states[3].v);
  auto metrics = sim::evaluate(back, back);
  CHECK(metrics.entropy_violations == 0);
}
