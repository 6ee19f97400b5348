#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "settler/constitutive.hpp"
#include "settler/fluxes.hpp"
#include "settler/grid.hpp"
#include "settler/mol.hpp"
#include "settler/reactions.hpp"
#include "settler/scenario.hpp"
#include "settler/state.hpp"
#include "settler/stepper.hpp"

namespace settler {

/// Godunov flux of the unimodal batch flux f with maximizer X_hat.
inline double godunov_flux(const Constitutive& law, double X_j, double X_j1) {
  const double xh = law.flux_maximizer();
  return std::min(law.flux(std::min(X_j, xh)), law.flux(std::max(X_j1, xh)));
}

/// Total concentrations plus component fractions. L = rho_L - r X is implied.
struct XpState {
  std::size_t k_C = 0;
  std::size_t k_S = 0;
  std::vector<double> X;    // cells
  std::vector<double> P_X;  // cells x k_C
  std::vector<double> P_L;  // cells x k_S

  std::size_t cells() const { return X.size(); }
};

/// Fractions from concentrations. Where X = 0 the solids split evenly.
inline XpState to_xp(const State& s, double rho_L, double r) {
  XpState x;
  x.k_C = s.k_C();
  x.k_S = s.k_S();
  const std::size_t n = s.cells();
  x.X.resize(n);
  x.P_X.resize(n * x.k_C);
  x.P_L.resize(n * x.k_S);
  for (std::size_t j = 0; j < n; ++j) {
    const double X = s.X(j);
    x.X[j] = X;
    for (std::size_t k = 0; k < x.k_C; ++k) {
      x.P_X[j * x.k_C + k] = X > 0.0 ? s.C(j, k) / X : 1.0 / static_cast<double>(x.k_C);
    }
    const double L = rho_L - r * X;
    for (std::size_t k = 0; k < x.k_S; ++k) {
      x.P_L[j * x.k_S + k] = s.S(j, k) / L;
    }
  }
  return x;
}

inline void from_xp(const XpState& x, double rho_L, double r, State& s) {
  if (s.cells() != x.cells() || s.k_C() != x.k_C || s.k_S() != x.k_S) {
    s = State(Layout{x.cells(), x.k_C, x.k_S});
  }
  for (std::size_t j = 0; j < x.cells(); ++j) {
    for (std::size_t k = 0; k < x.k_C; ++k) s.C(j, k) = x.P_X[j * x.k_C + k] * x.X[j];
    const double L = rho_L - r * x.X[j];
    for (std::size_t k = 0; k < x.k_S; ++k) s.S(j, k) = x.P_L[j * x.k_S + k] * L;
  }
}

inline State from_xp(const XpState& x, double rho_L, double r) {
  State s(Layout{x.cells(), x.k_C, x.k_S});
  from_xp(x, rho_L, r, s);
  return s;
}

struct XpBudget {
  double q_norm = 0.0;  // m/s
  double beta_X = 0.0;
  double beta_PX = 0.0;
  double beta_PL = 0.0;
  double dt_max = 0.0;
  double safety = 1.0;
};

inline XpBudget xp_cfl(double dz, const Constitutive& law, const ReactionBounds& rb, double q_norm,
                       double safety = 0.95) {
  const auto& n = law.norms();
  const double r = law.density_ratio();
  const double dz2 = dz * dz;
  XpBudget b;
  b.q_norm = q_norm;
  b.safety = safety;
  const double react = rb.M_C_total + r * rb.M_S_total;
  b.beta_X = n.flux_prime_sup / dz + n.xp_d_prime_sup / dz2 + react;
  b.beta_PX = b.beta_X - react + rb.M_C;
  b.beta_PL = (n.flux_sup / dz + n.xp_d_at_max / dz2) / (law.rho_X() - law.X_max()) + rb.M_C;
  b.dt_max = safety / (q_norm / dz + std::max({b.beta_X, b.beta_PX, b.beta_PL}));
  return b;
}

/// max |q| over [0, T] for a constant area.
inline double bulk_velocity_norm(const Scenario& sc, double area, double T) {
  std::vector<double> times = sc.Q_f.times();
  times.insert(times.end(), sc.Q_u.times().begin(), sc.Q_u.times().end());
  double m = 0.0;
  for (double t : times) {
    if (t > T && t > 0.0) continue;
    const double qf = sc.Q_f.at(t);
    const double qu = sc.Q_u.at(t);
    m = std::max({m, std::abs(qu - qf), std::abs(qu)});
  }
  return m / area;
}

struct XpWorkspace {
  std::vector<double> F_X;
  std::vector<double> flux_PX;
  std::vector<double> flux_PL;
  std::vector<double> C;
  std::vector<double> S;
  std::vector<double> R;
  std::vector<double> X_new;
};

/// One marching step of the percentage scheme. Requires a constant area.
inline void xp_step(const MolProblem& problem, XpState& x, double dt, const MolInputs& in, XpWorkspace& ws,
                    BoundaryFluxes* bf = nullptr) {
  const Grid& g = problem.grid();
  if (!g.constant_area) {
    throw std::invalid_argument("xp_step: the percentage scheme needs a constant cross-sectional area");
  }
  const Constitutive& law = problem.constitutive();
  const ReactionModel& rm = problem.reactions();
  const std::size_t nc = g.num_cells();
  const std::size_t nf = g.num_faces();
  const std::size_t kc = x.k_C;
  const std::size_t ks = x.k_S;
  const double A = g.A_cell.front();
  const double dz = g.dz;
  const double r = law.density_ratio();
  const double rho_L = law.rho_L();

  ws.F_X.resize(nf);
  ws.flux_PX.resize(nf * kc);
  ws.flux_PL.resize(nf * ks);
  ws.C.resize(kc);
  ws.S.resize(ks);
  ws.R.resize(kc + ks);
  ws.X_new.resize(nc);

  const double q_above = (in.Q_u - in.Q_f) / A;
  const double q_below = in.Q_u / A;
  for (std::size_t f = 0; f < nf; ++f) {
    const double q = g.face_above_feed(f) ? q_above : q_below;
    const double X_l = f == 0 ? 0.0 : x.X[f - 1];
    const double X_r = f + 1 == nf ? 0.0 : x.X[f];
    double F = pos(q) * X_l + neg(q) * X_r;
    if (g.gamma_face[f]) {
      F += godunov_flux(law, X_l, X_r) -
           (law.xp_compression_unchecked(X_r) - law.xp_compression_unchecked(X_l)) / dz;
    }
    ws.F_X[f] = F;
    const double FL = rho_L * q - r * F;
    for (std::size_t k = 0; k < kc; ++k) {
      const double pl = f == 0 ? 0.0 : x.P_X[(f - 1) * kc + k];
      const double pr = f + 1 == nf ? 0.0 : x.P_X[f * kc + k];
      ws.flux_PX[f * kc + k] = pos(F) * pl + neg(F) * pr;
    }
    for (std::size_t k = 0; k < ks; ++k) {
      const double pl = f == 0 ? 0.0 : x.P_L[(f - 1) * ks + k];
      const double pr = f + 1 == nf ? 0.0 : x.P_L[f * ks + k];
      ws.flux_PL[f * ks + k] = pos(FL) * pl + neg(FL) * pr;
    }
  }

  if (bf) {
    bf->resize(kc + ks);
    for (std::size_t k = 0; k < kc; ++k) {
      bf->top[k] = A * ws.flux_PX[k];
      bf->bottom[k] = A * ws.flux_PX[(nf - 1) * kc + k];
      bf->feed[k] = in.C_f[k] * in.Q_f;
    }
    for (std::size_t k = 0; k < ks; ++k) {
      bf->top[kc + k] = A * ws.flux_PL[k];
      bf->bottom[kc + k] = A * ws.flux_PL[(nf - 1) * ks + k];
      bf->feed[kc + k] = in.S_f[k] * in.Q_f;
    }
  }

  double X_f = 0.0;
  for (double c : in.C_f) X_f += c;
  const double q_f = in.Q_f / A;
  const auto jf = static_cast<std::size_t>(g.feed_cell);
  const double lam = dt / dz;
  for (std::size_t j = 0; j < nc; ++j) {
    const bool feed = j == jf;
    const double X = x.X[j];
    const double L = rho_L - r * X;
    std::fill(ws.R.begin(), ws.R.end(), 0.0);
    if (g.gamma_cell[j]) {
      for (std::size_t k = 0; k < kc; ++k) ws.C[k] = x.P_X[j * kc + k] * X;
      for (std::size_t k = 0; k < ks; ++k) ws.S[k] = x.P_L[j * ks + k] * L;
      rm.rates(ws.C, ws.S, {ws.R.data(), kc}, {ws.R.data() + kc, ks});
      if (bf) {
        for (std::size_t k = 0; k < kc + ks; ++k) bf->reaction[k] += A * dz * ws.R[k];
      }
    }
    double R_tot = 0.0;
    for (std::size_t k = 0; k < kc; ++k) R_tot += ws.R[k];
    const double X_new = X + lam * (-(ws.F_X[j + 1] - ws.F_X[j]) + (feed ? X_f * q_f : 0.0)) + dt * R_tot;
    ws.X_new[j] = X_new;
    for (std::size_t k = 0; k < kc; ++k) {
      const double psi = x.P_X[j * kc + k] * X +
                         lam * (-(ws.flux_PX[(j + 1) * kc + k] - ws.flux_PX[j * kc + k]) +
                                (feed ? in.C_f[k] * q_f : 0.0)) +
                         dt * ws.R[k];
      if (X_new > 0.0) x.P_X[j * kc + k] = psi / X_new;
    }
    const double L_new = rho_L - r * X_new;
    for (std::size_t k = 0; k < ks; ++k) {
      const double psi = x.P_L[j * ks + k] * L +
                         lam * (-(ws.flux_PL[(j + 1) * ks + k] - ws.flux_PL[j * ks + k]) +
                                (feed ? in.S_f[k] * q_f : 0.0)) +
                         dt * ws.R[kc + k];
      x.P_L[j * ks + k] = psi / L_new;
    }
  }
  x.X = ws.X_new;
}

/// Method XP bound to one problem; exposes concentrations for output.
class XpMethod {
 public:
  XpMethod(std::shared_ptr<const MolProblem> problem, const State& initial, double q_norm, double safety)
      : problem_(std::move(problem)) {
    const auto& g = problem_->grid();
    if (!g.constant_area) {
      throw std::invalid_argument("Method XP needs a constant cross-sectional area");
    }
    for (double d : problem_->diffusion()) {
      if (d != 0.0) throw std::invalid_argument("Method XP has no soluble diffusion; set all d^(k) = 0");
    }
    const auto& law = problem_->constitutive();
    x_ = to_xp(initial, law.rho_L(), law.density_ratio());
    state_ = initial;
    budget_ = xp_cfl(g.dz, law, problem_->reactions().derivative_bounds(), q_norm, safety);
  }

  std::string name() const { return "XP"; }
  const Grid& grid() const { return problem_->grid(); }
  const State& state() const { return state_; }
  const XpState& xp_state() const { return x_; }
  const XpBudget& budget() const { return budget_; }
  double dt_max() const { return budget_.dt_max; }

  void advance(double, double dt, const MolInputs& in, BoundaryFluxes* bf) {
    xp_step(*problem_, x_, dt, in, ws_, bf);
    const auto& law = problem_->constitutive();
    from_xp(x_, law.rho_L(), law.density_ratio(), state_);
  }

  void omega_check(OmegaPolicy policy, double slack, RunReport& rep) {
    const auto& law = problem_->constitutive();
    record_violations(state_, problem_->layout(), law.X_max(), policy, slack, rep);
    if (policy == OmegaPolicy::clamp && rep.clamp_events > 0) {
      x_ = to_xp(state_, law.rho_L(), law.density_ratio());
    }
  }

 private:
  std::shared_ptr<const MolProblem> problem_;
  XpState x_;
  State state_;
  XpBudget budget_;
  XpWorkspace ws_;
};

inline RunReport simulate_xp(const Scenario& sc, int N, const SimulationOptions& opt = {},
                             OutputSink* sink = nullptr, const Constitutive* law = nullptr,
                             State* final_state = nullptr) {
  validate_scenario(sc);
  const Constitutive own = law ? *law : Constitutive(sc.constitutive);
  auto problem = std::make_shared<const MolProblem>(make_problem(sc, N, own));
  const double T = opt.horizon >= 0.0 ? opt.horizon : sc.run.T;
  const double q_norm = bulk_velocity_norm(sc, problem->grid().A_cell.front(), T);
  XpMethod m(problem, initial_state(sc, problem->grid()), q_norm, opt.safety);
  RunReport rep = drive(m, sc, opt, sink);
  if (final_state) *final_state = m.state();
  return rep;
}

}  // namespace settler
