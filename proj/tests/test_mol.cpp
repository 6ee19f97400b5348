#include <cmath>
#include <memory>
#include <random>

#include <gtest/gtest.h>

#include "settler/mol.hpp"

using namespace settler;

namespace {

State random_state(const Layout& l, std::mt19937_64& rng, double X_max = 30.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  State s(l);
  for (std::size_t j = 0; j < l.cells; ++j) {
    const double X = X_max * u(rng);
    double w = 0.0;
    std::vector<double> parts(l.k_C);
    for (auto& p : parts) w += (p = u(rng) + 1e-3);
    for (std::size_t k = 0; k < l.k_C; ++k) s.C(j, k) = X * parts[k] / w;
    for (std::size_t k = 0; k < l.k_S; ++k) s.S(j, k) = 0.02 * u(rng);
  }
  return s;
}

struct Fixture {
  Scenario sc;
  MolProblem problem;
  std::vector<double> C_f, S_f;
  MolInputs in;

  explicit Fixture(Scenario s, int N = 24)
      : sc(std::move(s)), problem(make_problem(sc, N, Constitutive(sc.constitutive))) {
    in = averaged_inputs(sc, 0.0, 1.0, C_f, S_f);
  }
};

}  // namespace

TEST(Mol, FeedOnlyIntoFeedLayer) {
  Fixture fx(example1());
  const auto& g = fx.problem.grid();
  const State zero(fx.problem.layout());
  const State du = fx.problem.rhs(zero, fx.in);
  const auto jf = static_cast<std::size_t>(g.feed_cell);
  const double vol = g.A_cell[jf] * g.dz;
  for (std::size_t j = 0; j < du.cells(); ++j) {
    for (std::size_t k = 0; k < 2; ++k) {
      EXPECT_NEAR(du.C(j, k), j == jf ? fx.C_f[k] * fx.in.Q_f / vol : 0.0, 1e-18);
    }
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_NEAR(du.S(j, k), j == jf ? fx.S_f[k] * fx.in.Q_f / vol : 0.0, 1e-18);
    }
  }
}

TEST(Mol, InventoryRateEqualsBoundaryAndReactionTerms) {
  std::mt19937_64 rng(21);
  for (auto sc : {example1(), example2(), diffusion_example(5)}) {
    Fixture fx(sc, 40);
    const auto& g = fx.problem.grid();
    for (int trial = 0; trial < 5; ++trial) {
      const State s = random_state(fx.problem.layout(), rng);
      BoundaryFluxes bf;
      const State du = fx.problem.rhs(s, fx.in, &bf);
      for (std::size_t k = 0; k < 5; ++k) {
        double lhs = 0.0, scale = 0.0;
        for (std::size_t j = 0; j < s.cells(); ++j) {
          const double term = g.A_cell[j] * g.dz * du.values()[j * 5 + k];
          lhs += term;
          scale += std::abs(term);
        }
        const double rhs = bf.feed[k] + bf.top[k] - bf.bottom[k] + bf.reaction[k];
        EXPECT_NEAR(lhs, rhs, 1e-12 * scale) << sc.name << " component " << k;
      }
    }
  }
}

TEST(Mol, ReactionsOnlyInsideTheVessel) {
  Scenario with = example1();
  Scenario without = example1();
  without.reactions.kind = ReactionConfig::Kind::none;
  Fixture a(with), b(without);
  std::mt19937_64 rng(4);
  const State s = random_state(a.problem.layout(), rng);
  const State da = a.problem.rhs(s, a.in);
  const State db = b.problem.rhs(s, b.in);
  const std::size_t last = s.cells() - 1;
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_EQ(da.values()[k], db.values()[k]);
    EXPECT_EQ(da.values()[last * 5 + k], db.values()[last * 5 + k]);
  }
  double diff = 0.0;
  for (std::size_t j = 1; j < last; ++j) diff += std::abs(da.C(j, 0) - db.C(j, 0));
  EXPECT_GT(diff, 0.0);
}

TEST(Mol, StencilIsLocal) {
  Fixture fx(diffusion_example(5), 30);
  std::mt19937_64 rng(8);
  const State s = random_state(fx.problem.layout(), rng);
  const State base = fx.problem.rhs(s, fx.in);
  for (std::size_t i : {1u, 5u, 15u, 30u}) {
    State p = s;
    p.C(i, 0) *= 0.5;
    p.S(i, 1) += 0.01;
    const State d = fx.problem.rhs(p, fx.in);
    for (std::size_t j = 0; j < s.cells(); ++j) {
      const bool near = j + 1 >= i && j <= i + 1;
      if (near) continue;
      for (std::size_t k = 0; k < 5; ++k) {
        EXPECT_EQ(d.values()[j * 5 + k], base.values()[j * 5 + k]) << "cell " << j << " after touching " << i;
      }
    }
  }
}

TEST(Mol, ExtraFieldsReported) {
  Fixture fx(example1(), 16);
  std::mt19937_64 rng(2);
  const State s = random_state(fx.problem.layout(), rng);
  const auto ff = fx.problem.face_fluxes(s, fx.in);
  const auto& g = fx.problem.grid();
  ASSERT_EQ(ff.F_X.size(), g.num_faces());
  ASSERT_EQ(ff.phi_C.size(), g.num_faces() * 2);
  ASSERT_EQ(ff.phi_S.size(), g.num_faces() * 3);
  for (std::size_t f = 0; f < g.num_faces(); ++f) {
    EXPECT_NEAR(ff.phi_C[2 * f] + ff.phi_C[2 * f + 1], g.A_face[f] * ff.F_X[f], 1e-12);
    if (!g.gamma_face[f]) EXPECT_EQ(ff.J_C[f], 0.0);
  }
}

TEST(Mol, SizeMismatchRejected) {
  Fixture fx(example1(), 8);
  std::vector<double> u(3), du(3);
  MolWorkspace ws;
  EXPECT_THROW(fx.problem.rhs(u, fx.in, du, ws), std::invalid_argument);
  EXPECT_THROW(MolProblem(build_grid(example1(), 8), Constitutive(), std::make_shared<NoReactions>(2, 3),
                          std::vector<double>{0.0}),
               std::invalid_argument);
}

TEST(MolSystem, MatchesProblemAndGuardsInput) {
  const Scenario sc = example1();
  auto problem = std::make_shared<const MolProblem>(make_problem(sc, 16, Constitutive()));
  std::mt19937_64 rng(6);
  const State s = random_state(problem->layout(), rng);

  MolSystem sys(problem, sc, OmegaPolicy::clamp);
  std::vector<double> du;
  sys(s.values(), du, 100.0);
  std::vector<double> C_f, S_f;
  const MolInputs in{sc.Q_f.at(100.0), sc.Q_u.at(100.0), sc.C_f.at(100.0), sc.S_f.at(100.0)};
  const State direct = problem->rhs(s, in);
  EXPECT_EQ(du, direct.values());
  EXPECT_EQ(sys.clamp_events(), 0u);

  State bad = s;
  bad.S(3, 2) = -1.0;
  sys(bad.values(), du, 100.0);
  EXPECT_EQ(sys.clamp_events(), 1u);

  MolSystem strict(problem, sc, OmegaPolicy::strict);
  EXPECT_THROW(strict(bad.values(), du, 100.0), InvariantViolation);
}
