// Command-line surface: gen-data, train, simulate, evaluate. Batch runs with
// persisted artifacts and manifests; see README for configs and exit codes.
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "thermolearn/dataset_io.hpp"
#include "thermolearn/manifest.hpp"
#include "thermolearn/model_io.hpp"
#include "thermolearn/simulate.hpp"
#include "thermolearn/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace thermo;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitNonfiniteLoss = 4;
constexpr int kExitNewton = 5;

std::int64_t now_unix() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

json load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot read config " + path);
  return json::parse(f);
}

training::SystemModel system_from_config(const json& cfg) {
  auto sys = training::make_system(cfg.value("system", "piston"));
  if (cfg.contains("params")) {
    const json& p = cfg["params"];
    if (sys.name == "piston") {
      auto& pp = sys.piston;
      pp.m = p.value("m", pp.m);
      pp.A1 = p.value("A1", pp.A1);
      pp.A2 = p.value("A2", pp.A2);
      pp.L = p.value("L", pp.L);
      pp.NkB = p.value("NkB", pp.NkB);
      pp.c_hat = p.value("c_hat", pp.c_hat);
      if (p.contains("nu")) {
        pp.nu[0] = p["nu"].at(0).get<double>();
        pp.nu[1] = p["nu"].at(1).get<double>();
      }
      if (p.contains("kappa")) {
        pp.kappa[0] = p["kappa"].at(0).get<double>();
        pp.kappa[1] = p["kappa"].at(1).get<double>();
      }
    } else {
      auto& rp = sys.rigid;
      if (p.contains("inertia"))
        for (int i = 0; i < 3; ++i) rp.inertia[i] = p["inertia"].at(i);
      rp.gamma = p.value("gamma", rp.gamma);
      rp.U0 = p.value("U0", rp.U0);
      rp.nu0 = p.value("nu0", rp.nu0);
      rp.nu1 = p.value("nu1", rp.nu1);
      if (p.contains("Amix"))
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) rp.Amix[i][j] = p["Amix"].at(i).at(j);
    }
  }
  return sys;
}

training::DatasetSpec dataset_spec_from_config(const json& cfg,
                                               const std::string& system,
                                               const std::string& preset) {
  training::DatasetSpec spec;
  if (preset == "paper") {
    spec.n_traj = system == "piston" ? 200 : 100;
    spec.traj_len = 21;
  } else if (preset == "desk") {
    spec.n_traj = 25;
    spec.traj_len = 21;
  }
  if (cfg.contains("dataset")) {
    const json& d = cfg["dataset"];
    spec.n_traj = d.value("n_traj", spec.n_traj);
    spec.traj_len = d.value("traj_len", spec.traj_len);
    spec.h = d.value("h", spec.h);
    spec.rel_tol = d.value("rel_tol", spec.rel_tol);
    spec.abs_tol = d.value("abs_tol", spec.abs_tol);
  }
  return spec;
}

struct PresetHp {
  int epochs;
  double lr_init, lr_final;
  int batch = 0;
};

PresetHp training_preset(const std::string& preset, const std::string& system,
                         training::Regime regime) {
  using training::Regime;
  if (preset == "paper") {
    if (system == "piston") {
      if (regime == Regime::kLearnF) return {50000, 1e-3, 1e-4};
      return {100000, 1e-3, 1e-3};
    }
    if (regime == Regime::kLearnG) return {5000, 1e-2, 1e-2};
    return {300000, 1e-2, 1e-4};
  }
  // desk scale
  if (system == "rigid_body") {
    if (regime == Regime::kLearnG) return {5000, 1e-2, 1e-3, 100};
    return {5000, 1e-2, 1e-3};
  }
  return {5000, 2e-2, 1e-3};
}

training::TrainConfig train_config_from(const json& cfg,
                                        const std::string& preset,
                                        std::uint64_t seed, int threads) {
  training::TrainConfig tc;
  tc.system = system_from_config(cfg);
  tc.regime = training::regime_from_name(cfg.value("regime", "learn_F"));
  PresetHp hp = training_preset(preset, tc.system.name, tc.regime);
  tc.epochs = cfg.value("epochs", hp.epochs);
  tc.lr_init = cfg.value("lr_init", hp.lr_init);
  tc.lr_final = cfg.value("lr_final", hp.lr_final);
  tc.batch = cfg.value("batch", hp.batch);
  tc.seed = seed;
  tc.newton_tol = cfg.value("newton_tol", 1e-11);
  tc.dataset = dataset_spec_from_config(cfg, tc.system.name, preset);
  tc.hidden = cfg.value("hidden", std::vector<int>{24, 24, 24});
  tc.activation =
      nets::activation_from_name(cfg.value("activation", "sigmoid"));
  tc.threads = threads;
  tc.log_stride = cfg.value("log_stride", 1);
  tc.stop_after = cfg.value("stop_after", 0);
  return tc;
}

json checkpoint_to_json(const training::TrainCheckpoint& c) {
  json j;
  j["next_epoch"] = c.next_epoch;
  j["params"] = c.params;
  j["adam"]["m"] = c.adam.m;
  j["adam"]["v"] = c.adam.v;
  j["adam"]["t"] = c.adam.t;
  j["initial_loss"] = c.initial_loss;
  j["best_loss"] = c.best_loss;
  j["best_epoch"] = c.best_epoch;
  j["best_params"] = c.best_params;
  j["logged_epochs"] = c.logged_epochs;
  j["loss_history"] = c.loss_history;
  j["lr_history"] = c.lr_history;
  return j;
}

training::TrainCheckpoint checkpoint_from_json(const json& j) {
  training::TrainCheckpoint c;
  c.next_epoch = j.at("next_epoch").get<int>();
  c.params = j.at("params").get<Vec>();
  c.adam.m = j.at("adam").at("m").get<Vec>();
  c.adam.v = j.at("adam").at("v").get<Vec>();
  c.adam.t = j.at("adam").at("t").get<long>();
  c.initial_loss = j.at("initial_loss").get<double>();
  c.best_loss = j.at("best_loss").get<double>();
  c.best_epoch = j.at("best_epoch").get<int>();
  c.best_params = j.at("best_params").get<Vec>();
  c.logged_epochs = j.at("logged_epochs").get<std::vector<int>>();
  c.loss_history = j.at("loss_history").get<Vec>();
  c.lr_history = j.at("lr_history").get<Vec>();
  return c;
}

// ---- simulate helpers ------------------------------------------------------

ObservableState piston_validation_observable(const training::SystemModel& s) {
  auto H = systems::piston_hamiltonian_field(s.piston);
  return observable_from_phase(H, PhaseState{{0.5}, {-0.5}, {0.5, 0.5}});
}

ReducedObservable rigid_validation_observable(const training::SystemModel& s) {
  auto h = systems::rigid_hamiltonian_field(s.rigid);
  return observable_from_phase(h, ReducedPhase{{0.5, -0.5, -0.5}, 0.0});
}

GField load_gfield(const json& cfg, const training::SystemModel& sys) {
  const std::string spec = cfg.value("G_model", "exact");
  if (spec == "exact") return systems::piston_gfield(sys.piston);
  auto m = io::load_model(spec);
  if (m.kind != "scalar_G")
    throw std::invalid_argument("G_model file is not a scalar_G model");
  return make_mlp_gfield(m.net, sys.n_q, sys.P);
}

ForceField load_force_field(const json& cfg,
                            const training::SystemModel& sys) {
  if (!cfg.contains("F_model") || cfg["F_model"] == "exact")
    return systems::piston_force_field(sys.piston);
  std::vector<nets::DissipativeForceModel> channels;
  for (const auto& path : cfg["F_model"])
    channels.push_back(
        io::load_model(path.get<std::string>()).as_dissipative());
  if (static_cast<int>(channels.size()) != sys.P)
    throw std::invalid_argument("F_model needs one file per entropy channel");
  return make_dissipative_force_field(std::move(channels), sys.n_q, sys.P);
}

ReducedGField load_reduced_gfield(const json& cfg,
                                  const training::SystemModel& sys) {
  const std::string spec = cfg.value("G_model", "exact");
  if (spec == "exact") return systems::rigid_gfield(sys.rigid);
  auto m = io::load_model(spec);
  if (m.kind != "scalar_G")
    throw std::invalid_argument("G_model file is not a scalar_G model");
  return make_mlp_reduced_gfield(m.net);
}

ReducedForceField load_reduced_force_field(const json& cfg,
                                           const training::SystemModel& sys) {
  if (!cfg.contains("F_model") || cfg["F_model"] == "exact")
    return systems::rigid_force_field(sys.rigid);
  const auto& fm = cfg["F_model"];
  const std::string path =
      fm.is_array() ? fm.at(0).get<std::string>() : fm.get<std::string>();
  return make_dissipative_reduced_force_field(
      io::load_model(path).as_dissipative());
}

// Ground-truth trajectory on the same grid, from the matched phase point.
sim::Trajectory reference_trajectory(const training::SystemModel& sys,
                                     const json& init_cfg, int steps,
                                     double h) {
  Vec t_grid;
  for (int i = 0; i <= steps; ++i) t_grid.push_back(h * i);
  sim::Trajectory out;
  out.h = h;
  if (sys.kind == StateKind::kThermal) {
    auto H = systems::piston_hamiltonian_field(sys.piston);
    auto F = systems::piston_force_field(sys.piston);
    PhaseState ic;
    if (init_cfg.is_string() && init_cfg == "validation") {
      ic = PhaseState{{0.5}, {-0.5}, {0.5, 0.5}};
    } else if (init_cfg.contains("p") && init_cfg.contains("S")) {
      ic = PhaseState{init_cfg.at("q").get<Vec>(), init_cfg.at("p").get<Vec>(),
                      init_cfg.at("S").get<Vec>()};
    } else {
      // Observable init: recover (p, S) through the exact G.
      ObservableState obs{init_cfg.at("q").get<Vec>(),
                          init_cfg.at("v").get<Vec>(),
                          init_cfg.at("T").get<Vec>()};
      GEval e = eval_gfield(systems::piston_gfield(sys.piston), obs);
      ic = PhaseState{obs.q, e.dG_dv, e.dG_dT};
    }
    auto phase = systems::reference_integrate(H, F, ic, t_grid);
    out.kind = StateKind::kThermal;
    for (const auto& s : phase) {
      auto obs = observable_from_phase(H, s);
      out.states.push_back(obs);
      out.energy.push_back(systems::piston_hamiltonian(sys.piston, s));
      out.entropy.push_back(s.S);
      out.momentum.push_back(s.p);
    }
  } else {
    auto H = systems::rigid_hamiltonian_field(sys.rigid);
    auto F = systems::rigid_force_field(sys.rigid);
    ReducedPhase ic{{0.5, -0.5, -0.5}, 0.0};
    if (!(init_cfg.is_string() && init_cfg == "validation")) {
      if (init_cfg.contains("mu")) {
        for (int i = 0; i < 3; ++i) ic.mu[i] = init_cfg["mu"].at(i);
        ic.S = init_cfg.value("S", 0.0);
      } else {
        Vec3 omega;
        for (int i = 0; i < 3; ++i) omega[i] = init_cfg.at("Omega").at(i);
        const double T = init_cfg.at("T").get<double>();
        const double S =
            systems::rigid_entropy_from_omega_T(sys.rigid, omega, T);
        for (int i = 0; i < 3; ++i)
          ic.mu[i] = std::exp(-sys.rigid.gamma * S) * sys.rigid.inertia[i] *
                     omega[i];
        ic.S = S;
      }
    }
    auto phase = systems::reference_integrate(H, F, ic, t_grid);
    out.kind = StateKind::kReduced;
    for (const auto& s : phase) {
      auto obs = observable_from_phase(H, s);
      out.states.push_back(to_observable(obs));
      out.energy.push_back(systems::rigid_hamiltonian(sys.rigid, s.mu, s.S));
      out.entropy.push_back({s.S});
      out.momentum.push_back({s.mu[0], s.mu[1], s.mu[2]});
    }
  }
  return out;
}

// ---- subcommands -----------------------------------------------------------

int cmd_gen_data(const json& cfg, const std::string& preset,
                 std::uint64_t seed, int threads, const fs::path& out_dir) {
  io::RunManifest manifest;
  manifest.command = "gen-data";
  manifest.config = cfg;
  manifest.seed = seed;
  manifest.threads = threads;
  manifest.version = io::kVersion;
  manifest.started_unix = now_unix();

  auto sys = system_from_config(cfg);
  auto spec = dataset_spec_from_config(cfg, sys.name, preset);

  TrajectoryDataset d;
  try {
    d = training::generate_dataset(sys, spec, seed);
  } catch (const std::exception& e) {
    std::cerr << "gen-data: reference solver failed: " << e.what() << "\n";
    return kExitSolver;
  }

  fs::create_directories(out_dir);
  const auto csv = (out_dir / "dataset.csv").string();
  const auto meta = (out_dir / "dataset.json").string();
  io::save_dataset(d, csv, meta);
  manifest.add_output(csv);
  manifest.add_output(meta);
  manifest.finished_unix = now_unix();
  manifest.write((out_dir / "manifest.json").string());
  std::cout << "wrote " << d.pairs.size() << " pairs to " << csv << "\n";
  return 0;
}

int cmd_train(const json& cfg, const std::string& preset, std::uint64_t seed,
              int threads, const fs::path& out_dir,
              const std::string& data_csv, const std::string& data_meta,
              const std::string& resume_path) {
  io::RunManifest manifest;
  manifest.command = "train";
  manifest.config = cfg;
  manifest.seed = seed;
  manifest.threads = threads;
  manifest.version = io::kVersion;
  manifest.started_unix = now_unix();

  auto tc = train_config_from(cfg, preset, seed, threads);
  auto data = io::load_dataset(data_csv, data_meta);
  manifest.add_input(data_csv);
  manifest.add_input(data_meta);
  if ((tc.system.kind == StateKind::kThermal) !=
      (data.meta.kind == StateKind::kThermal)) {
    std::cerr << "train: dataset kind does not match the system\n";
    return kExitConfig;
  }

  fs::create_directories(out_dir);
  const auto ckpt_path = (out_dir / "checkpoint.json").string();
  training::TrainCheckpoint resume;
  const training::TrainCheckpoint* resume_ptr = nullptr;
  if (!resume_path.empty()) {
    resume = checkpoint_from_json(load_config(resume_path));
    resume_ptr = &resume;
    manifest.add_input(resume_path);
  }

  const int ckpt_stride =
      cfg.value("checkpoint_stride", std::max(1, tc.epochs / 10));
  training::CheckpointSink sink = [&](const training::TrainCheckpoint& c) {
    std::ofstream f(ckpt_path);
    f << checkpoint_to_json(c).dump() << "\n";
  };

  auto report = training::train(tc, data, resume_ptr, sink, ckpt_stride);

  // Loss history CSV: epoch, loss, lr.
  const auto loss_csv = (out_dir / "loss_history.csv").string();
  {
    std::ofstream f(loss_csv);
    f << "epoch,loss,lr\n";
    for (std::size_t i = 0; i < report.loss_history.size(); ++i)
      f << report.logged_epochs[i] << ","
        << io::format_double(report.loss_history[i]) << ","
        << io::format_double(report.lr_history[i]) << "\n";
  }
  manifest.add_output(loss_csv);

  auto save_models = [&](const training::TrainedModels& models,
                         const std::string& prefix) {
    if (models.g) {
      io::StoredModel m;
      m.kind = "scalar_G";
      m.net = *models.g;
      const auto path = (out_dir / (prefix + "model_g.json")).string();
      io::save_model(m, path);
      manifest.add_output(path);
    }
    for (std::size_t c = 0; c < models.f.size(); ++c) {
      io::StoredModel m;
      m.kind = "dissipative_force";
      m.net = models.f[c].net;
      m.n = models.f[c].n;
      m.antisymmetric_part = models.f[c].antisymmetric_part;
      const auto path =
          (out_dir / (prefix + "model_f_" + std::to_string(c + 1) + ".json"))
              .string();
      io::save_model(m, path);
      manifest.add_output(path);
    }
  };
  save_models(report.best_models, "");  // the persisted model is the best one
  save_models(report.final_models, "final_");

  json rj;
  rj["initial_loss"] = report.initial_loss;
  rj["best_loss"] = report.best_loss;
  rj["best_epoch"] = report.best_epoch;
  rj["final_loss"] = report.final_loss;
  rj["orders_reduced"] =
      std::log10(report.initial_loss / std::max(report.best_loss, 1e-300));
  rj["n_params"] = report.n_params;
  rj["wall_time_seconds"] = report.wall_time_seconds;
  rj["gradient_check_max_rel_err"] = report.gradient_check_max_rel_err;
  rj["aborted_nonfinite"] = report.aborted_nonfinite;
  if (report.gauge_ambiguity_warning)
    rj["warning"] =
        "learn_both is ill-posed: scale, affine and coordinate-temperature "
        "gauge freedoms make (G, F) identifiable only up to invariances";
  const auto report_path = (out_dir / "train_report.json").string();
  {
    std::ofstream f(report_path);
    f << rj.dump(2) << "\n";
  }
  manifest.add_output(report_path);
  if (fs::exists(ckpt_path)) manifest.add_output(ckpt_path);
  manifest.finished_unix = now_unix();
  manifest.write((out_dir / "manifest.json").string());

  std::cout << rj.dump(2) << "\n";
  if (report.aborted_nonfinite) {
    std::cerr << "train: loss became nonfinite; last good checkpoint kept\n";
    return kExitNonfiniteLoss;
  }
  return 0;
}

int cmd_simulate(const json& cfg, std::uint64_t seed, int threads,
                 const fs::path& out_dir) {
  io::RunManifest manifest;
  manifest.command = "simulate";
  manifest.config = cfg;
  manifest.seed = seed;
  manifest.threads = threads;
  manifest.version = io::kVersion;
  manifest.started_unix = now_unix();

  auto sys = system_from_config(cfg);
  const int steps = cfg.value("steps", 500);
  const double h = cfg.value("h", 0.1);
  const json init_cfg = cfg.value("init", json("validation"));
  const std::string integrator = cfg.value("integrator", "variational");

  integrators::StepOptions opts;
  opts.newton.tol = cfg.value("newton_tol", 1e-11);

  sim::Trajectory traj;
  if (integrator == "reference") {
    traj = reference_trajectory(sys, init_cfg, steps, h);
  } else if (sys.kind == StateKind::kThermal) {
    auto g = load_gfield(cfg, sys);
    auto f = load_force_field(cfg, sys);
    ObservableState init =
        (init_cfg.is_string() && init_cfg == "validation")
            ? piston_validation_observable(sys)
            : ObservableState::checked(init_cfg.at("q").get<Vec>(),
                                       init_cfg.at("v").get<Vec>(),
                                       init_cfg.at("T").get<Vec>());
    traj = sim::simulate_thermal(g, f, init, steps, h, opts);
  } else {
    auto g = load_reduced_gfield(cfg, sys);
    auto f = load_reduced_force_field(cfg, sys);
    ReducedObservable init;
    if (init_cfg.is_string() && init_cfg == "validation") {
      init = rigid_validation_observable(sys);
    } else {
      Vec3 omega;
      for (int i = 0; i < 3; ++i) omega[i] = init_cfg.at("Omega").at(i);
      init = ReducedObservable::checked(omega, init_cfg.at("T").get<double>());
    }
    traj = sim::simulate_reduced(g, f, init, steps, h, opts);
  }

  fs::create_directories(out_dir);
  const auto csv = (out_dir / "trajectory.csv").string();
  sim::write_trajectory_csv(traj, csv);
  manifest.add_output(csv);
  manifest.finished_unix = now_unix();
  manifest.write((out_dir / "manifest.json").string());
  std::cout << "wrote " << traj.states.size() << " states to " << csv << "\n";
  return 0;
}

int cmd_evaluate(const std::string& traj_path, const std::string& ref_path,
                 const std::string& out_path) {
  auto traj = sim::read_trajectory_csv(traj_path);
  auto ref = sim::read_trajectory_csv(ref_path);
  auto metrics = sim::evaluate(traj, ref);
  const std::string text = sim::metrics_to_json(metrics);
  std::cout << text << "\n";
  if (!out_path.empty()) {
    fs::path p(out_path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream f(out_path);
    f << text << "\n";

    io::RunManifest manifest;
    manifest.command = "evaluate";
    manifest.config = {{"traj", traj_path}, {"ref", ref_path}};
    manifest.version = io::kVersion;
    manifest.started_unix = manifest.finished_unix = now_unix();
    manifest.add_input(traj_path);
    manifest.add_input(ref_path);
    manifest.add_output(out_path);
    const fs::path mdir = p.has_parent_path() ? p.parent_path() : fs::path(".");
    manifest.write((mdir / "manifest.json").string());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Learning and simulating dissipative thermodynamic systems "
      "from observable data"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", preset = "desk";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "config JSON path")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--preset", preset, "defaults preset")
        ->check(CLI::IsMember({"paper", "desk"}));
    sub->add_option("--seed", seed, "seed override")
        ->each([&](const std::string&) { seed_set = true; });
    sub->add_option("--threads", threads,
                    "worker cap; 1 guarantees bitwise determinism");
  };

  auto* gen = app.add_subcommand("gen-data", "generate an observable dataset");
  add_common(gen);

  std::string data_csv, data_meta, resume_path;
  auto* train = app.add_subcommand("train", "fit G and/or F networks");
  add_common(train);
  train->add_option("--data", data_csv, "dataset CSV")->required();
  train->add_option("--meta", data_meta,
                    "dataset metadata JSON (default: CSV with .json)");
  train->add_option("--resume", resume_path, "checkpoint JSON to resume from");

  auto* simulate = app.add_subcommand("simulate", "roll a trajectory");
  add_common(simulate);

  std::string traj_path, ref_path, metrics_out;
  auto* evaluate =
      app.add_subcommand("evaluate", "compare a trajectory to a reference");
  evaluate->add_option("--traj", traj_path, "trajectory CSV")->required();
  evaluate->add_option("--ref", ref_path, "reference CSV")->required();
  evaluate->add_option("--out", metrics_out, "metrics JSON output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (gen->parsed() || train->parsed() || simulate->parsed()) {
      json cfg = load_config(config_path);
      if (!seed_set) seed = cfg.value("seed", std::uint64_t{0});
      if (gen->parsed())
        return cmd_gen_data(cfg, preset, seed, threads, out_dir);
      if (train->parsed()) {
        if (data_meta.empty()) {
          data_meta = data_csv;
          const auto pos = data_meta.rfind(".csv");
          if (pos != std::string::npos)
            data_meta.replace(pos, 4, ".json");
          else
            data_meta += ".json";
        }
        return cmd_train(cfg, preset, seed, threads, out_dir, data_csv,
                         data_meta, resume_path);
      }
      return cmd_simulate(cfg, seed, threads, out_dir);
    }
    return cmd_evaluate(traj_path, ref_path, metrics_out);
  } catch (const NewtonDiverged& e) {
    std::cerr << "newton divergence: " << e.what() << "\n";
    return kExitNewton;
  } catch (const NonfiniteLoss& e) {
    std::cerr << "nonfinite loss: " << e.what() << "\n";
    return kExitNonfiniteLoss;
  } catch (const GridMismatch& e) {
    std::cerr << "grid mismatch: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
