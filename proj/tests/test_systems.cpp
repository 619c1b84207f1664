#include <cmath>

#include "doctest.h"
#include "thermolearn/fields.hpp"
#include "thermolearn/rng.hpp"
#include "thermolearn/systems.hpp"

using namespace thermo;
using systems::PistonParams;
using systems::RigidBodyParams;

namespace {

const PistonParams kPiston{};
const RigidBodyParams kRigid{};

// Standard validation point: (x, p, S1, S2) = (0.5, -0.5, 0.5, 0.5).
PhaseState piston_validation_ic() {
  return PhaseState{{0.5}, {-0.5}, {0.5, 0.5}};
}

double fd_x(const std::function<double(double)>& f, double x,
            double step = 1e-6) {
  return (f(x + step) - f(x - step)) / (2.0 * step);
}

}  // namespace

TEST_CASE("Sackur-Tetrode energy") {
  CHECK(systems::sackur_tetrode_U(0.0, 1.0) == doctest::Approx(1.0));
  // Direct-evaluation oracle through pow/exp, a separate code path.
  const double oracle = std::pow(2.5, -2.0 / 3.0) * std::exp(0.5);
  CHECK(systems::sackur_tetrode_U(0.5, 2.5) ==
        doctest::Approx(oracle).epsilon(1e-14));
  CHECK(systems::sackur_tetrode_U(0.5, 2.5) ==
        doctest::Approx(0.8951).epsilon(5e-4));
  CHECK(systems::sackur_tetrode_U(0.5, 3.0) ==
        doctest::Approx(0.7926).epsilon(5e-4));
  CHECK_THROWS_AS(systems::sackur_tetrode_U(0.0, -1.0), NonpositiveVolume);

  SUBCASE("temperature identity dU/dS = U/NkB") {
    for (double S : {0.0, 0.3, 0.9}) {
      const double u = systems::sackur_tetrode_U(S, 2.0, 1.0);
      const double du = fd_x(
          [&](double s) { return systems::sackur_tetrode_U(s, 2.0, 1.0); }, S);
      CHECK(du == doctest::Approx(u).epsilon(1e-9));
    }
  }
}

TEST_CASE("piston Hamiltonian at the validation point") {
  const double H = systems::piston_hamiltonian(kPiston, piston_validation_ic());
  const double oracle = 0.125 + std::pow(2.5, -2.0 / 3.0) * std::exp(0.5) +
                        std::pow(3.0, -2.0 / 3.0) * std::exp(0.5);
  CHECK(H == doctest::Approx(oracle).epsilon(1e-14));
  CHECK(H == doctest::Approx(1.8128).epsilon(5e-4));
  CHECK_THROWS_AS(
      systems::piston_hamiltonian(kPiston, PhaseState{{2.5}, {0.0}, {0, 0}}),
      PistonOutOfRange);
}

TEST_CASE("piston conservative force by finite differences") {
  // -d(U1+U2)/dx at the validation point; derived oracle -0.1136.
  auto u_total = [&](double x) {
    return systems::sackur_tetrode_U(0.5, kPiston.A1 * (kPiston.L + x)) +
           systems::sackur_tetrode_U(0.5, kPiston.A2 * (kPiston.L - x));
  };
  const double force = -fd_x(u_total, 0.5);
  CHECK(force == doctest::Approx(-0.1136).epsilon(5e-3));

  // The same number through the G field's dG/dq (equal to -dH/dq).
  auto g = systems::piston_gfield(kPiston);
  auto H = systems::piston_hamiltonian_field(kPiston);
  auto obs = observable_from_phase(H, piston_validation_ic());
  GEval e = eval_gfield(g, obs);
  CHECK(e.dG_dq[0] == doctest::Approx(force).epsilon(1e-4));
}

TEST_CASE("piston friction coefficients at v = 0") {
  ObservableState obs{{0.0}, {0.0}, {1.0, 1.0}};
  auto forces = systems::piston_forces(kPiston, obs);
  CHECK(forces[0][0] == 0.0);
  CHECK(forces[1][0] == 0.0);
  // lambda_i = nu_i at v = 0: probe with v = eps.
  ObservableState obs_eps{{0.0}, {1e-9}, {1.0, 1.0}};
  auto f_eps = systems::piston_forces(kPiston, obs_eps);
  CHECK(f_eps[0][0] / -1e-9 == doctest::Approx(0.02).epsilon(1e-6));
  CHECK(f_eps[1][0] / -1e-9 == doctest::Approx(0.04).epsilon(1e-6));
}

TEST_CASE("piston observables at the validation point") {
  auto H = systems::piston_hamiltonian_field(kPiston);
  auto obs = observable_from_phase(H, piston_validation_ic());
  CHECK(obs.v[0] == doctest::Approx(-0.5).epsilon(1e-12));
  // Chamber assignment: T1 belongs to V1 = 2.5, T2 to V2 = 3; the
  // Sackur-Tetrode identity T_i = V_i^(-2/3) e^(S_i) pins the order.
  CHECK(obs.T[0] == doctest::Approx(0.8951).epsilon(5e-4));
  CHECK(obs.T[1] == doctest::Approx(0.7926).epsilon(5e-4));
}

TEST_CASE("piston temperatures equal internal energies (NkB = 1)") {
  auto H = systems::piston_hamiltonian_field(kPiston);
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    PhaseState s{{rng.uniform(-1.0, 1.0)},
                 {rng.uniform(-1.0, 1.0)},
                 {rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)}};
    auto obs = observable_from_phase(H, s);
    const double u1 =
        systems::sackur_tetrode_U(s.S[0], kPiston.A1 * (kPiston.L + s.q[0]));
    const double u2 =
        systems::sackur_tetrode_U(s.S[1], kPiston.A2 * (kPiston.L - s.q[0]));
    CHECK(obs.T[0] == doctest::Approx(u1).epsilon(1e-12));
    CHECK(obs.T[1] == doctest::Approx(u2).epsilon(1e-12));
  }
}

TEST_CASE("observable_from_phase matches finite differences of H") {
  auto H = systems::piston_hamiltonian_field(kPiston);
  Rng rng(17);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    PhaseState s{{rng.uniform(-1.0, 1.0)},
                 {rng.uniform(-1.0, 1.0)},
                 {rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)}};
    auto obs = observable_from_phase(H, s);
    auto H_at = [&](PhaseState ss) {
      return systems::piston_hamiltonian(kPiston, ss);
    };
    PhaseState sp = s;
    const double dp = fd_x(
        [&](double p) {
          sp.p[0] = p;
          return H_at(sp);
        },
        s.p[0]);
    sp = s;
    const double ds1 = fd_x(
        [&](double S1) {
          sp.S[0] = S1;
          return H_at(sp);
        },
        s.S[0]);
    worst = std::max(worst, std::fabs(obs.v[0] - dp) /
                                std::max(1.0, std::fabs(dp)));
    worst = std::max(worst, std::fabs(obs.T[0] - ds1) /
                                std::max(1.0, std::fabs(ds1)));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("rigid body validation point") {
  const Vec3 mu{0.5, -0.5, -0.5};
  const double H = systems::rigid_hamiltonian(kRigid, mu, 0.0);
  CHECK(H == doctest::Approx(1.2292).epsilon(5e-4));

  auto h = systems::rigid_hamiltonian_field(kRigid);
  auto obs = observable_from_phase(h, ReducedPhase{mu, 0.0});
  CHECK(obs.omega[0] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(obs.omega[1] == doctest::Approx(-0.25).epsilon(1e-10));
  CHECK(obs.omega[2] == doctest::Approx(-1.0 / 6).epsilon(1e-10));
  CHECK(obs.T == doctest::Approx(1.229).epsilon(5e-4));
  // T = gamma H for this Hamiltonian.
  CHECK(obs.T == doctest::Approx(kRigid.gamma * H).epsilon(1e-12));
}

TEST_CASE("rigid friction properties") {
  CHECK(systems::rigid_friction(kRigid, {0, 0, 0}, 1.0) == Vec3{0, 0, 0});

  SUBCASE("dissipative for random Omega") {
    Rng rng(23);
    double worst = -1.0;
    for (int trial = 0; trial < 10000; ++trial) {
      Vec3 w{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
             rng.uniform(-2.0, 2.0)};
      if (w[0] == 0 && w[1] == 0 && w[2] == 0) continue;
      Vec3 f = systems::rigid_friction(kRigid, w, 1.0);
      worst = std::max(worst, dot3(f, w));
    }
    CHECK(worst < 0.0);
  }

  SUBCASE("tanh part derives from the log-cosh Rayleigh function") {
    auto rayleigh = [&](const Vec3& w) {
      double r = 0.0;
      for (int j = 0; j < 3; ++j) {
        double aw = 0.0;
        for (int k = 0; k < 3; ++k) aw += kRigid.Amix[j][k] * w[k];
        r += std::log(std::cosh(aw));
      }
      return kRigid.nu1 * r;
    };
    Vec3 w{0.4, -0.3, 0.8};
    Vec3 f = systems::rigid_friction(kRigid, w, 1.0);
    for (int i = 0; i < 3; ++i) {
      Vec3 wp = w;
      const double dr = fd_x(
          [&](double wi) {
            wp[i] = wi;
            return rayleigh(wp);
          },
          w[i]);
      // f_i = -nu0 w_i - dR/dw_i
      CHECK(f[i] == doctest::Approx(-kRigid.nu0 * w[i] - dr).epsilon(1e-7));
    }
  }
}

TEST_CASE("rigid thermal Lagrangian: closed form and Legendre consistency") {
  SUBCASE("Omega = 0 closed form") {
    for (double T : {0.8, 1.229, 3.0}) {
      const double S =
          systems::rigid_entropy_from_omega_T(kRigid, {0, 0, 0}, T);
      CHECK(S == doctest::Approx(std::log(T / (kRigid.gamma * kRigid.U0)) /
                                 kRigid.gamma));
      CHECK(systems::rigid_G_closed_form(kRigid, {0, 0, 0}, T) ==
            doctest::Approx(T * S - T / kRigid.gamma).epsilon(1e-12));
    }
  }

  SUBCASE("entropy round trip over random physical points") {
    auto h = systems::rigid_hamiltonian_field(kRigid);
    Rng rng(29);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      ReducedPhase s;
      for (int i = 0; i < 3; ++i) s.mu[i] = rng.uniform(-1.0, 1.0);
      s.S = rng.uniform(0.0, 1.0);
      auto obs = observable_from_phase(h, s);
      const double S_back =
          systems::rigid_entropy_from_omega_T(kRigid, obs.omega, obs.T);
      worst = std::max(worst, std::fabs(S_back - s.S));
    }
    CHECK(worst < 1e-10);
  }

  SUBCASE("dG/dOmega = mu and dG/dT = S by finite differences") {
    auto h = systems::rigid_hamiltonian_field(kRigid);
    Rng rng(31);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      ReducedPhase s;
      for (int i = 0; i < 3; ++i) s.mu[i] = rng.uniform(-1.0, 1.0);
      s.S = rng.uniform(0.0, 1.0);
      auto obs = observable_from_phase(h, s);
      for (int i = 0; i < 3; ++i) {
        Vec3 w = obs.omega;
        const double dG = fd_x(
            [&](double wi) {
              w[i] = wi;
              return systems::rigid_G_closed_form(kRigid, w, obs.T);
            },
            obs.omega[i]);
        worst = std::max(worst, std::fabs(dG - s.mu[i]));
      }
      const double dGdT = fd_x(
          [&](double T) {
            return systems::rigid_G_closed_form(kRigid, obs.omega, T);
          },
          obs.T);
      worst = std::max(worst, std::fabs(dGdT - s.S));
    }
    CHECK(worst < 1e-8);
  }

  SUBCASE("unphysical point throws") {
    CHECK_THROWS_AS(systems::rigid_G_closed_form(kRigid, {5.0, 5.0, 5.0}, 0.1),
                    OutsidePhysicalDomain);
  }
}

TEST_CASE("reference integrator: free particle is exact") {
  PhaseHamiltonian H;
  H.n_q = 1;
  H.P = 1;
  H.emit = [](ad::Tape& t, std::span<const ad::Var> q,
              std::span<const ad::Var> p, std::span<const ad::Var> S) {
    (void)q;
    return 0.5 * (p[0] * p[0]) + S[0];  // dH/dS = 1 keeps T positive
  };
  ForceField F;
  F.n_q = 1;
  F.P = 1;
  F.emit_channel = [](ad::Tape& t, int, std::span<const ad::Var>,
                      std::span<const ad::Var>, std::span<const ad::Var>) {
    return std::vector<ad::Var>{t.constant(0.0)};
  };
  PhaseState ic{{0.0}, {0.7}, {0.2}};
  Vec t_grid{0.0, 1.0, 2.0, 5.0};
  auto traj = systems::reference_integrate(H, F, ic, t_grid);
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    CHECK(std::fabs(traj[i].q[0] - 0.7 * t_grid[i]) < 1e-12);
    CHECK(std::fabs(traj[i].p[0] - 0.7) < 1e-13);
    CHECK(std::fabs(traj[i].S[0] - 0.2) < 1e-13);
  }
}

TEST_CASE("piston reference trajectory conserves H and grows both entropies") {
  auto H = systems::piston_hamiltonian_field(kPiston);
  auto F = systems::piston_force_field(kPiston);
  PhaseState ic = piston_validation_ic();
  Vec t_grid;
  for (int i = 0; i <= 100; ++i) t_grid.push_back(0.5 * i);  // [0, 50]
  auto traj = systems::reference_integrate(H, F, ic, t_grid);

  const double H0 = systems::piston_hamiltonian(kPiston, traj.front());
  double worst = 0.0;
  for (const auto& s : traj)
    worst = std::max(worst, std::fabs(systems::piston_hamiltonian(kPiston, s) -
                                      H0));
  CHECK(worst / std::fabs(H0) < 1e-8);

  for (std::size_t k = 1; k < traj.size(); ++k) {
    CHECK(traj[k].S[0] >= traj[k - 1].S[0] - 1e-12);
    CHECK(traj[k].S[1] >= traj[k - 1].S[1] - 1e-12);
  }
}

TEST_CASE("rigid reference trajectory keeps T = gammaH constant to 1e-8") {
  auto h = systems::rigid_hamiltonian_field(kRigid);
  auto f = systems::rigid_force_field(kRigid);
  ReducedPhase ic{{0.5, -0.5, -0.5}, 0.0};
  Vec t_grid;
  for (int i = 0; i <= 100; ++i) t_grid.push_back(0.2 * i);  // [0, 20]
  auto traj = systems::reference_integrate(h, f, ic, t_grid);

  const double T0 = kRigid.gamma * systems::rigid_hamiltonian(
                                        kRigid, traj.front().mu, traj.front().S);
  double worst = 0.0;
  for (const auto& s : traj) {
    const double T = kRigid.gamma * systems::rigid_hamiltonian(kRigid, s.mu, s.S);
    worst = std::max(worst, std::fabs(T - T0));
  }
  CHECK(worst / T0 < 1e-8);

  // Entropy must grow: the friction is strictly dissipative.
  CHECK(traj.back().S > traj.front().S);
}

TEST_CASE("quadratic kinetic Hamiltonian gives v = 0 at p = 0") {
  PhaseHamiltonian H;
  H.n_q = 2;
  H.P = 1;
  H.emit = [](ad::Tape&, std::span<const ad::Var> q,
              std::span<const ad::Var> p, std::span<const ad::Var> S) {
    (void)q;
    return 0.5 * (p[0] * p[0]) + 1.5 * (p[1] * p[1]) + 0.25 * p[0] * p[1] +
           ad::exp(S[0]);
  };
  auto obs = observable_from_phase(H, PhaseState{{0.3, -0.2}, {0.0, 0.0},
                                                 {0.1}});
  CHECK(obs.v[0] == 0.0);
  CHECK(obs.v[1] == 0.0);
}
