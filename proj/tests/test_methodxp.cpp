#include <cmath>
#include <memory>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "settler/methodxp.hpp"

using namespace settler;

namespace {

const Constitutive& law() {
  static const Constitutive c;
  return c;
}

}  // namespace

TEST(Godunov, ConsistentWithBatchFlux) {
  for (double X = 0.0; X <= 30.0; X += 0.25) EXPECT_DOUBLE_EQ(godunov_flux(law(), X, X), law().flux(X));
}

TEST(Godunov, MatchesRiemannOracle) {
  static const oracle::FluxScan scan(oracle::Params{});
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 30.0);
  for (int i = 0; i < 20000; ++i) {
    const double a = u(rng), b = u(rng);
    const double expected = scan.riemann_flux(a, b);
    EXPECT_NEAR(godunov_flux(law(), a, b), expected, 1e-6 * std::max(expected, 1e-12)) << a << ' ' << b;
  }
}

TEST(Godunov, Monotone) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 30.0);
  for (int i = 0; i < 5000; ++i) {
    const double a = u(rng), b = u(rng), h = 0.01;
    EXPECT_GE(godunov_flux(law(), std::min(a + h, 30.0), b), godunov_flux(law(), a, b) - 1e-18);
    EXPECT_LE(godunov_flux(law(), a, std::min(b + h, 30.0)), godunov_flux(law(), a, b) + 1e-18);
  }
}

TEST(XpState, RoundTrip) {
  const Scenario sc = example1();
  const State s = initial_state(sc, build_grid(sc, 32));
  const XpState x = to_xp(s, law().rho_L(), law().density_ratio());
  const State back = from_xp(x, law().rho_L(), law().density_ratio());
  for (std::size_t i = 0; i < s.values().size(); ++i) {
    EXPECT_NEAR(back.values()[i], s.values()[i], 1e-14 * (1.0 + std::abs(s.values()[i])));
  }
  for (std::size_t j = 0; j < x.cells(); ++j) {
    EXPECT_NEAR(x.P_X[2 * j] + x.P_X[2 * j + 1], 1.0, 1e-14);
  }
}

TEST(XpStep, PreservesUniformLiquidComposition) {
  Scenario sc = example1();
  sc.reactions.kind = ReactionConfig::Kind::none;
  const MolProblem p = make_problem(sc, 32, law());
  State s(p.layout());
  const double c = 1e-5;
  for (std::size_t j = 0; j < s.cells(); ++j) {
    for (std::size_t k = 0; k < 3; ++k) s.S(j, k) = c * law().rho_L() * static_cast<double>(k + 1);
  }
  XpState x = to_xp(s, law().rho_L(), law().density_ratio());
  const std::vector<double> C_f{0.0, 0.0};
  const std::vector<double> S_f{c * law().rho_L(), 2 * c * law().rho_L(), 3 * c * law().rho_L()};
  const MolInputs in{0.1, 0.02, C_f, S_f};
  XpWorkspace ws;
  const double dt = xp_cfl(p.grid().dz, law(), {}, 0.1 / 400.0, 0.9).dt_max;
  for (int n = 0; n < 50; ++n) xp_step(p, x, dt, in, ws);
  for (std::size_t j = 0; j < x.cells(); ++j) {
    EXPECT_EQ(x.X[j], 0.0);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(x.P_L[j * 3 + k], c * static_cast<double>(k + 1), 1e-18);
  }
}

TEST(XpStep, RejectsVariableArea) {
  const Scenario sc = example2();
  const MolProblem p = make_problem(sc, 20, law());
  XpState x = to_xp(initial_state(sc, p.grid()), law().rho_L(), law().density_ratio());
  std::vector<double> C_f, S_f;
  const auto in = averaged_inputs(sc, 0.0, 1.0, C_f, S_f);
  XpWorkspace ws;
  EXPECT_THROW(xp_step(p, x, 1.0, in, ws), std::invalid_argument);
  EXPECT_THROW(simulate_xp(sc, 20), std::invalid_argument);
}

TEST(XpMethod, RejectsDiffusion) {
  Scenario sc = example1();
  sc.diffusion = {0.0, 0.0, 1e-6};
  EXPECT_THROW(simulate_xp(sc, 16, {.horizon = 60.0}), std::invalid_argument);
}

TEST(XpCfl, BudgetFromHandComputedConstants) {
  const Denitrification rm;
  const auto rb = rm.derivative_bounds();
  const double dz = 0.04, q = 3e-4;
  const double r = 998.0 / 1050.0;
  const double fprime = 1.76e-3, dprime = 2.06885065e-4, fmax = 3.76688829e-3, dmax = 4.80183245e-4;
  const double react = 5.56e-5 + r * 30.0 * 5.56e-5 / 5e-4;
  const double bX = fprime / dz + dprime / (dz * dz) + react;
  const double bPX = fprime / dz + dprime / (dz * dz) + 5.56e-5;
  const double bPL = (fmax / dz + dmax / (dz * dz)) / 1020.0 + 5.56e-5;
  const auto b = xp_cfl(dz, law(), rb, q, 1.0);
  EXPECT_NEAR(b.beta_X, bX, 1e-8 * bX);
  EXPECT_NEAR(b.beta_PX, bPX, 1e-8 * bPX);
  EXPECT_NEAR(b.beta_PL, bPL, 1e-8 * bPL);
  EXPECT_NEAR(b.dt_max, 1.0 / (q / dz + std::max({bX, bPX, bPL})), 1e-8 * b.dt_max);
}

TEST(XpMethod, ShortRunIsAdmissibleAndConservative) {
  Scenario sc = example1();
  SimulationOptions opt;
  opt.horizon = 1.0 * kHour;
  const auto rep = simulate_xp(sc, 32, opt);
  EXPECT_EQ(rep.method, "XP");
  EXPECT_EQ(rep.omega_violations, 0u);
  EXPECT_LT(rep.audit.max_relative, 1e-12);
  EXPECT_EQ(rep.final_time, opt.horizon);
}

TEST(XpMethod, BulkVelocityNorm) {
  const Scenario sc = example1();
  EXPECT_NEAR(bulk_velocity_norm(sc, 400.0, 9 * kHour), (450.0 - 30.0) / 3600.0 / 400.0, 1e-15);
}
