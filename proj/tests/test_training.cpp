#include <cmath>

#include "doctest.h"
#include "thermolearn/training.hpp"

using namespace thermo;
using training::DatasetSpec;
using training::Regime;
using training::SystemModel;
using training::TrainConfig;

namespace {

SystemModel piston_sys() { return training::make_system("piston"); }
SystemModel rigid_sys() { return training::make_system("rigid_body"); }

TrajectoryDataset tiny_piston_data(int n_traj, int traj_len,
                                   std::uint64_t seed = 7) {
  DatasetSpec spec;
  spec.n_traj = n_traj;
  spec.traj_len = traj_len;
  spec.h = 0.1;
  return training::generate_dataset(piston_sys(), spec, seed);
}

}  // namespace

TEST_CASE("adam_step") {
  SUBCASE("zero gradient from a fresh state leaves parameters unchanged") {
    Vec params{1.0, -2.0};
    training::AdamState st;
    Vec before = params;
    training::adam_step(params, Vec{0.0, 0.0}, st, 0.1);
    CHECK(params[0] == before[0]);
    CHECK(params[1] == before[1]);
  }

  SUBCASE("zero gradient decays existing moments geometrically") {
    Vec params{1.0, -2.0};
    training::AdamState st;
    st.m = {0.5, 0.5};
    st.v = {0.25, 0.25};
    st.t = 10;
    training::adam_step(params, Vec{0.0, 0.0}, st, 0.1);
    CHECK(st.m[0] == doctest::Approx(0.45));
    CHECK(st.v[0] == doctest::Approx(0.25 * 0.999));
  }

  SUBCASE("constant gradient: update magnitude approaches lr") {
    Vec params{0.0};
    training::AdamState st;
    double prev = params[0];
    double delta = 0.0;
    for (int i = 0; i < 200; ++i) {
      training::adam_step(params, Vec{3.7}, st, 0.05);
      delta = prev - params[0];
      prev = params[0];
    }
    CHECK(delta == doctest::Approx(0.05).epsilon(1e-2));
  }

  SUBCASE("1d quadratic converges to its minimum at lr 0.01") {
    Vec w{7.0};
    training::AdamState st;
    for (int i = 0; i < 5000; ++i) {
      Vec grad{w[0] - 3.0};
      training::adam_step(w, grad, st, 0.01);
      if (std::fabs(w[0] - 3.0) < 1e-7) break;
    }
    CHECK(std::fabs(w[0] - 3.0) < 1e-6);
  }

  SUBCASE("shape mismatch throws") {
    Vec params{1.0, 2.0};
    training::AdamState st;
    CHECK_THROWS_AS(training::adam_step(params, Vec{1.0}, st, 0.1),
                    ArityMismatch);
  }
}

TEST_CASE("generate_dataset shapes and invariants") {
  SUBCASE("traj_len = 2 gives one pair per trajectory") {
    auto d = tiny_piston_data(5, 2);
    CHECK(d.pairs.size() == 5);
    CHECK(validate_dataset(d).empty());
  }

  SUBCASE("pairs chain within trajectories and count n_traj*(len-1)") {
    auto d = tiny_piston_data(4, 6);
    CHECK(d.pairs.size() == 4 * 5);
    CHECK(validate_dataset(d).empty());
  }

  SUBCASE("rigid dataset uses the reduced layout") {
    DatasetSpec spec;
    spec.n_traj = 3;
    spec.traj_len = 3;
    auto d = training::generate_dataset(rigid_sys(), spec, 11);
    CHECK(d.pairs.size() == 6);
    CHECK(d.meta.n_q == 0);
    CHECK(d.meta.P == 1);
    CHECK(d.pairs[0].start.q.empty());
    CHECK(d.pairs[0].start.v.size() == 3);
    CHECK(validate_dataset(d).empty());
  }
}

TEST_CASE("zero-loss fixpoint: data from the integrator itself") {
  auto sys = piston_sys();
  auto g = sys.exact_gfield();
  auto f = sys.exact_force_field();
  auto H = systems::piston_hamiltonian_field(sys.piston);

  integrators::StepOptions opts;
  opts.newton.tol = 1e-13;
  TrajectoryDataset d;
  d.meta.n_q = 1;
  d.meta.P = 2;
  auto s = observable_from_phase(H, PhaseState{{0.5}, {-0.5}, {0.5, 0.5}});
  for (int k = 0; k < 10; ++k) {
    auto next = integrators::step_thermal(g, f, s, 0.1, opts);
    d.pairs.push_back({0, 0.1, s, next});
    s = next;
  }
  CHECK(training::loss_thermal(g, f, d) < 1e-18);

  auto rg = rigid_sys();
  auto gr = rg.exact_reduced_gfield();
  auto fr = rg.exact_reduced_force_field();
  auto hr = systems::rigid_hamiltonian_field(rg.rigid);
  TrajectoryDataset dr;
  dr.meta.n_q = 0;
  dr.meta.P = 1;
  auto rs = observable_from_phase(hr, ReducedPhase{{0.5, -0.5, -0.5}, 0.0});
  for (int k = 0; k < 10; ++k) {
    auto next = integrators::step_so3(gr, fr, rs, 0.1, opts);
    dr.pairs.push_back({0, 0.1, to_observable(rs), to_observable(next)});
    rs = next;
  }
  CHECK(training::loss_so3(gr, fr, dr) < 1e-18);
}

TEST_CASE("loss gauge invariances at the loss level") {
  auto sys = piston_sys();
  auto g = sys.exact_gfield();
  auto f = sys.exact_force_field();
  auto d = tiny_piston_data(3, 4);

  const double base = training::loss_thermal(g, f, d);

  SUBCASE("affine shift leaves the loss unchanged") {
    GField g2 = g;
    g2.emit = [g](ad::Tape& t, std::span<const ad::Var> q,
                  std::span<const ad::Var> v, std::span<const ad::Var> T) {
      return g.emit(t, q, v, T) + 3.1 - 0.8 * T[0] + 0.45 * T[1] +
             2.2 * v[0];
    };
    const double shifted = training::loss_thermal(g2, f, d);
    CHECK(std::fabs(shifted - base) / base < 1e-14);
  }

  SUBCASE("scaling (G, F) by k multiplies the loss by k^2") {
    const double k = 2.5;
    GField g2 = g;
    g2.emit = [g, k](ad::Tape& t, std::span<const ad::Var> q,
                     std::span<const ad::Var> v, std::span<const ad::Var> T) {
      return k * g.emit(t, q, v, T);
    };
    ForceField f2 = f;
    f2.emit_channel = [f, k](ad::Tape& t, int ch, std::span<const ad::Var> q,
                             std::span<const ad::Var> v,
                             std::span<const ad::Var> T) {
      auto out = f.emit_channel(t, ch, q, v, T);
      for (auto& x : out) x = k * x;
      return out;
    };
    const double scaled = training::loss_thermal(g2, f2, d);
    CHECK(std::fabs(scaled - k * k * base) / (k * k * base) < 1e-12);
  }

  SUBCASE("so3 affine invariance") {
    auto rg = rigid_sys();
    auto gr = rg.exact_reduced_gfield();
    auto fr = rg.exact_reduced_force_field();
    DatasetSpec spec;
    spec.n_traj = 3;
    spec.traj_len = 4;
    auto dr = training::generate_dataset(rg, spec, 5);
    const double b0 = training::loss_so3(gr, fr, dr);
    // Constant and T-linear shifts only: the reduced bracket terms see
    // mu = dG/dOmega pointwise, so an Omega-linear term is not a gauge.
    ReducedGField g2;
    g2.emit = [gr](ad::Tape& t, std::span<const ad::Var> omega, ad::Var T) {
      return gr.emit(t, omega, T) + 1.5 + 0.6 * T;
    };
    const double b1 = training::loss_so3(g2, fr, dr);
    CHECK(std::fabs(b1 - b0) / b0 < 1e-13);
  }
}

TEST_CASE("parameter gradient of the thermal loss matches finite differences") {
  // 2-neuron hidden layers, 10 pairs, all parameters of both unknown sides.
  auto d = tiny_piston_data(2, 6);  // 10 pairs
  REQUIRE(d.pairs.size() == 10);
  training::TrainProblem problem(piston_sys(), Regime::kLearnBoth, d, {2},
                                 nets::Activation::kSigmoid);
  Vec params = problem.init_params(3);
  auto lg = problem.loss_and_grad(params);

  double worst = 0.0;
  for (int i = 0; i < problem.n_params(); ++i) {
    const double step = 1e-6 * std::max(1.0, std::fabs(params[i]));
    Vec p = params;
    p[i] += step;
    const double hi = problem.loss(p);
    p[i] = params[i] - step;
    const double lo = problem.loss(p);
    const double fd = (hi - lo) / (2.0 * step);
    const double denom =
        std::max({std::fabs(fd), std::fabs(lg.grad[i]), 1e-8});
    worst = std::max(worst, std::fabs(fd - lg.grad[i]) / denom);
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("parameter gradient of the so3 loss matches finite differences") {
  DatasetSpec spec;
  spec.n_traj = 2;
  spec.traj_len = 4;
  auto d = training::generate_dataset(rigid_sys(), spec, 13);
  training::TrainProblem problem(rigid_sys(), Regime::kLearnBoth, d, {2},
                                 nets::Activation::kSigmoid);
  Vec params = problem.init_params(5);
  auto lg = problem.loss_and_grad(params);

  double worst = 0.0;
  for (int i = 0; i < problem.n_params(); i += 3) {
    const double step = 1e-6 * std::max(1.0, std::fabs(params[i]));
    Vec p = params;
    p[i] += step;
    const double hi = problem.loss(p);
    p[i] = params[i] - step;
    const double lo = problem.loss(p);
    const double fd = (hi - lo) / (2.0 * step);
    const double denom =
        std::max({std::fabs(fd), std::fabs(lg.grad[i]), 1e-8});
    worst = std::max(worst, std::fabs(fd - lg.grad[i]) / denom);
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("threaded loss equals serial loss bitwise") {
  auto d = tiny_piston_data(3, 5);
  training::TrainProblem problem(piston_sys(), Regime::kLearnF, d, {4},
                                 nets::Activation::kSigmoid);
  Vec params = problem.init_params(21);
  auto serial = problem.loss_and_grad(params, 1);
  auto parallel = problem.loss_and_grad(params, 4);
  CHECK(serial.loss == parallel.loss);
  for (std::size_t i = 0; i < serial.grad.size(); ++i)
    CHECK(serial.grad[i] == parallel.grad[i]);
}

TEST_CASE("train: determinism, checkpointing and report bookkeeping") {
  auto d = tiny_piston_data(2, 4);
  TrainConfig cfg;
  cfg.system = piston_sys();
  cfg.regime = Regime::kLearnF;
  cfg.epochs = 25;
  cfg.lr_init = 0.01;
  cfg.lr_final = 0.001;
  cfg.seed = 42;
  cfg.hidden = {4};

  auto r1 = training::train(cfg, d);
  auto r2 = training::train(cfg, d);
  REQUIRE(r1.loss_history.size() == r2.loss_history.size());
  for (std::size_t i = 0; i < r1.loss_history.size(); ++i)
    CHECK(r1.loss_history[i] == r2.loss_history[i]);

  // Best-so-far is non-increasing and best <= every logged loss.
  for (double l : r1.loss_history) CHECK(r1.best_loss <= l);
  CHECK(std::isfinite(r1.final_loss));
  CHECK(r1.gradient_check_max_rel_err < 1e-4);
  CHECK_FALSE(r1.gauge_ambiguity_warning);
  CHECK(r1.best_models.f.size() == 2);
  CHECK_FALSE(r1.best_models.g.has_value());

  SUBCASE("learn_both raises the gauge-ambiguity flag") {
    cfg.regime = Regime::kLearnBoth;
    cfg.epochs = 2;
    auto r = training::train(cfg, d);
    CHECK(r.gauge_ambiguity_warning);
    CHECK(r.best_models.g.has_value());
  }

  SUBCASE("invalid learning-rate schedule is rejected") {
    cfg.lr_final = 0.1;  // larger than lr_init
    CHECK_THROWS_AS(training::train(cfg, d), std::invalid_argument);
    cfg.lr_final = 0.0;
    CHECK_THROWS_AS(training::train(cfg, d), std::invalid_argument);
  }

  SUBCASE("zero epochs persists the initial model unchanged") {
    cfg.epochs = 0;
    auto r = training::train(cfg, d);
    training::TrainProblem problem(cfg.system, cfg.regime, d, cfg.hidden,
                                   cfg.activation);
    Vec init = problem.init_params(cfg.seed);
    auto models = problem.unpack(init);
    REQUIRE(r.final_models.f.size() == models.f.size());
    for (std::size_t c = 0; c < models.f.size(); ++c)
      CHECK(r.final_models.f[c].net.params == models.f[c].net.params);
  }
}

TEST_CASE("training reduces the loss on a small piston learn_F run") {
  auto d = tiny_piston_data(4, 6);  // 20 pairs
  TrainConfig cfg;
  cfg.system = piston_sys();
  cfg.regime = Regime::kLearnF;
  cfg.epochs = 800;
  cfg.lr_init = 0.02;
  cfg.lr_final = 0.002;
  cfg.seed = 1;
  cfg.hidden = {8};
  auto r = training::train(cfg, d);
  // This tiny 20-pair set floors near initial/10 (the residual-consistency
  // floor of the scheme at h = 0.1); the 1.5-order criterion lives in the
  // acceptance suite at the full desk scale.
  CHECK(r.best_loss < r.initial_loss / 8.0);
}

TEST_CASE("mini-batch epochs: deterministic and tracked by full-dataset loss") {
  auto d = tiny_piston_data(2, 6);  // 10 pairs
  TrainConfig cfg;
  cfg.system = piston_sys();
  cfg.regime = Regime::kLearnF;
  cfg.epochs = 12;
  cfg.lr_init = 0.01;
  cfg.lr_final = 0.005;
  cfg.seed = 5;
  cfg.hidden = {4};
  cfg.batch = 4;  // one epoch = ceil(10/4) = 3 Adam updates

  auto r1 = training::train(cfg, d);
  auto r2 = training::train(cfg, d);
  REQUIRE(r1.loss_history.size() == r2.loss_history.size());
  for (std::size_t i = 0; i < r1.loss_history.size(); ++i)
    CHECK(r1.loss_history[i] == r2.loss_history[i]);

  // The initial loss is the pre-update full loss, identical to full batch.
  TrainConfig full = cfg;
  full.batch = 0;
  auto rf = training::train(full, d);
  CHECK(r1.initial_loss == rf.initial_loss);
  // Three updates per epoch make more progress than one at equal epochs.
  CHECK(r1.final_loss < rf.final_loss);
}
