#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "thermolearn/dissipative.hpp"
#include "thermolearn/integrators.hpp"
#include "thermolearn/states.hpp"
#include "thermolearn/systems.hpp"

namespace thermo::training {

// Bundle of one ground-truth system: name, state layout and parameters.
struct SystemModel {
  std::string name = "piston";  // "piston" | "rigid_body"
  StateKind kind = StateKind::kThermal;
  int n_q = 1;
  int P = 2;
  systems::PistonParams piston{};
  systems::RigidBodyParams rigid{};

  GField exact_gfield() const;
  ForceField exact_force_field() const;
  ReducedGField exact_reduced_gfield() const;
  ReducedForceField exact_reduced_force_field() const;
};

SystemModel make_system(const std::string& name);

struct DatasetSpec {
  int n_traj = 200;
  int traj_len = 21;
  double h = 0.1;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
};

/// Samples phase-space initial conditions uniformly in the system's box
/// (piston: -1 <= x,p <= 1, 0 <= S_i <= 1; rigid: |mu|_inf <= 1, 0 < S < 1),
/// integrates the reference dynamics, converts each grid state to observables
/// and emits consecutive pairs. Phase data never enters the dataset.
TrajectoryDataset generate_dataset(const SystemModel& sys,
                                   const DatasetSpec& spec,
                                   std::uint64_t seed);

/// Sum over pairs of |r_momentum|^2 + |r_entropy|^2 with v_k taken from the
/// data (the velocity line defines v_k and is excluded).
double loss_thermal(const GField& g, const ForceField& f,
                    const TrajectoryDataset& d,
                    const integrators::ResidualOptions& opts = {});

double loss_so3(const ReducedGField& g, const ReducedForceField& f,
                const TrajectoryDataset& d,
                const integrators::ResidualOptions& opts = {});

struct AdamState {
  Vec m, v;
  long t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Standard bias-corrected Adam update, in place.
void adam_step(Vec& params, const Vec& grad, AdamState& state, double lr);

enum class Regime { kLearnG, kLearnF, kLearnBoth };

Regime regime_from_name(const std::string& name);
std::string regime_name(Regime r);

struct TrainConfig {
  SystemModel system;
  Regime regime = Regime::kLearnF;
  int epochs = 5000;
  double lr_init = 1e-2;
  double lr_final = 1e-3;
  int batch = 0;  // 0 = full batch
  std::uint64_t seed = 0;
  double newton_tol = 1e-11;
  DatasetSpec dataset;
  std::vector<int> hidden{24, 24, 24};
  nets::Activation activation = nets::Activation::kSigmoid;
  int threads = 1;
  int log_stride = 1;
  bool gradient_check = true;
  // Halt after this many epochs while keeping the full-epochs lr schedule
  // (0 = run to completion). Resuming from the checkpoint then reproduces
  // the uninterrupted run bit for bit.
  int stop_after = 0;
  integrators::ResidualOptions residual;
};

struct TrainedModels {
  std::optional<nets::MlpModel> g;              // learned G, when trained
  std::vector<nets::DissipativeForceModel> f;   // learned force channels
};

struct TrainReport {
  std::vector<int> logged_epochs;
  Vec loss_history;   // loss before the update at each logged epoch
  Vec lr_history;
  double initial_loss = 0.0;
  double best_loss = 0.0;
  int best_epoch = -1;
  double final_loss = 0.0;
  double wall_time_seconds = 0.0;
  double gradient_check_max_rel_err = 0.0;
  bool gauge_ambiguity_warning = false;  // learn_both is ill-posed (gauge
                                         // invariances); see README
  bool aborted_nonfinite = false;
  TrainedModels best_models;
  TrainedModels final_models;
  int n_params = 0;
};

struct LossAndGrad {
  double loss = 0.0;
  Vec grad;
};

// Differentiable training objective over a flat parameter vector
// [G-net | F-net-1 | F-net-2 ...] (present parts only). Pair terms are
// reduced with a fixed pairwise tree so parallel and serial sums agree
// bitwise.
class TrainProblem {
 public:
  TrainProblem(SystemModel sys, Regime regime, const TrajectoryDataset& data,
               std::vector<int> hidden, nets::Activation activation,
               integrators::ResidualOptions ropts = {});

  int n_params() const { return n_params_; }
  Vec init_params(std::uint64_t seed) const;

  double loss(std::span<const double> params, int threads = 1) const;
  LossAndGrad loss_and_grad(std::span<const double> params,
                            int threads = 1) const;
  /// Restrict the next evaluations to a pair subset (mini-batching); empty
  /// restores the full batch.
  void set_active_pairs(std::vector<int> indices);

  TrainedModels unpack(std::span<const double> params) const;

 private:
  struct Slice {
    int offset = 0, size = 0;
  };
  SystemModel sys_;
  Regime regime_;
  const TrajectoryDataset* data_;
  std::vector<int> active_;
  nets::MlpArchitecture g_arch_;
  std::vector<nets::DissipativeForceModel> f_shapes_;  // params empty
  bool learn_g_ = false, learn_f_ = false;
  Slice g_slice_;
  std::vector<Slice> f_slices_;
  int n_params_ = 0;
  integrators::ResidualOptions ropts_;
  mutable Vec pair_vals_;
  mutable Vec pair_grads_;  // n_active x n_params, row-major

  void evaluate(std::span<const double> params, int threads,
                bool with_grad) const;
  double pair_term(ad::Tape& tape, std::span<const ad::Var> leaves,
                   const ObservablePair& pair, ad::Var* term_out) const;
};

// Full optimizer state at an epoch boundary; enough to resume a run
// bit-identically (single-threaded or with the fixed tree reduction).
struct TrainCheckpoint {
  int next_epoch = 0;
  Vec params;
  AdamState adam;
  double initial_loss = 0.0;
  double best_loss = std::numeric_limits<double>::infinity();
  int best_epoch = -1;
  Vec best_params;
  std::vector<int> logged_epochs;
  Vec loss_history;
  Vec lr_history;
};

using CheckpointSink = std::function<void(const TrainCheckpoint&)>;

TrainReport train(const TrainConfig& cfg, const TrajectoryDataset& data,
                  const TrainCheckpoint* resume = nullptr,
                  const CheckpointSink& checkpoint_sink = nullptr,
                  int checkpoint_stride = 0);

}  // namespace thermo::training
