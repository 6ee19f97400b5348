#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "settler/constitutive.hpp"
#include "settler/fluxes.hpp"
#include "settler/grid.hpp"
#include "settler/reactions.hpp"
#include "settler/scenario.hpp"
#include "settler/state.hpp"

namespace settler {

/// Boundary data frozen over one evaluation (interval averages for a time step).
struct MolInputs {
  double Q_f = 0.0;
  double Q_u = 0.0;
  std::span<const double> C_f;
  std::span<const double> S_f;
};

inline MolInputs averaged_inputs(const Scenario& sc, double t, double dt, std::vector<double>& C_f,
                                 std::vector<double>& S_f) {
  C_f = sc.C_f.average(t, dt);
  S_f = sc.S_f.average(t, dt);
  return {sc.Q_f.average(t, dt), sc.Q_u.average(t, dt), C_f, S_f};
}

/// Rates of change of the vessel inventory, per component (solids then
/// solubles), in kg/s: d/dt sum_j A_j dz U_j = feed + top - bottom + reaction.
/// `top` and `bottom` are the signed downward fluxes through z_{-1/2} and z_{N+3/2}.
struct BoundaryFluxes {
  std::vector<double> top;
  std::vector<double> bottom;
  std::vector<double> feed;
  std::vector<double> reaction;

  void resize(std::size_t n) {
    top.assign(n, 0.0);
    bottom.assign(n, 0.0);
    feed.assign(n, 0.0);
    reaction.assign(n, 0.0);
  }
};

struct MolWorkspace {
  std::vector<double> X;
  std::vector<double> vhs;
  std::vector<double> Dc;
  std::vector<double> phi;  // faces x stride
  std::vector<double> F_X;
  std::vector<double> v_X;
  std::vector<double> q;
  std::vector<double> Q_face;
  std::vector<double> R;
  std::vector<double> ghost;
};

/// Semi-discrete system: grid, material laws, reactions and soluble diffusion.
class MolProblem {
 public:
  MolProblem(Grid grid, Constitutive law, std::shared_ptr<const ReactionModel> reactions,
             std::vector<double> diffusion)
      : grid_(std::move(grid)), law_(std::move(law)), reactions_(std::move(reactions)),
        diffusion_(std::move(diffusion)) {
    if (!reactions_) {
      throw std::invalid_argument("MolProblem: reaction model required");
    }
    if (diffusion_.size() != reactions_->num_solubles()) {
      throw std::invalid_argument("MolProblem: need one diffusion coefficient per soluble");
    }
    layout_ = Layout{grid_.num_cells(), reactions_->num_solids(), reactions_->num_solubles()};
  }

  const Grid& grid() const { return grid_; }
  const Constitutive& constitutive() const { return law_; }
  const ReactionModel& reactions() const { return *reactions_; }
  std::shared_ptr<const ReactionModel> reactions_ptr() const { return reactions_; }
  const std::vector<double>& diffusion() const { return diffusion_; }
  const Layout& layout() const { return layout_; }

  /// du = dU/dt for the flat state u (see Layout). Reentrant: all scratch
  /// lives in `ws`. Optionally reports boundary and reaction mass rates.
  void rhs(std::span<const double> u, const MolInputs& in, std::span<double> du, MolWorkspace& ws,
           BoundaryFluxes* bf = nullptr) const {
    const Grid& g = grid_;
    const std::size_t nc = g.num_cells();
    const std::size_t nf = g.num_faces();
    const std::size_t kc = layout_.k_C;
    const std::size_t ks = layout_.k_S;
    const std::size_t st = layout_.stride();
    if (u.size() != layout_.size() || du.size() != layout_.size()) {
      throw std::invalid_argument("mol_rhs: state size does not match the layout");
    }
    ws.X.resize(nc);
    ws.vhs.resize(nc);
    ws.Dc.resize(nc);
    ws.phi.resize(nf * st);
    ws.F_X.resize(nf);
    ws.v_X.resize(nf);
    ws.R.resize(st);
    ws.ghost.assign(st, 0.0);
    face_bulk_flow(g, in.Q_f, in.Q_u, ws.Q_face, ws.q);

    for (std::size_t j = 0; j < nc; ++j) {
      double x = 0.0;
      for (std::size_t k = 0; k < kc; ++k) x += u[j * st + k];
      ws.X[j] = x;
      if (g.gamma_cell[j]) {
        ws.vhs[j] = law_.vhs(x);
        ws.Dc[j] = law_.big_dc_unchecked(x);
      } else {
        ws.vhs[j] = 0.0;
        ws.Dc[j] = 0.0;
      }
    }

    const double dz = g.dz;
    const double rho_X = law_.rho_X();
    for (std::size_t f = 0; f < nf; ++f) {
      // face f lies between cells f-1 and f; ghosts beyond the ends are zero
      const double* left = f == 0 ? ws.ghost.data() : u.data() + (f - 1) * st;
      const double* right = f + 1 == nf ? ws.ghost.data() : u.data() + f * st;
      const double X_l = f == 0 ? 0.0 : ws.X[f - 1];
      const double X_r = f + 1 == nf ? 0.0 : ws.X[f];
      const bool gam = g.gamma_face[f] != 0;
      const double v = gam ? vx_from(ws.q[f], true, ws.vhs[f], ws.Dc[f - 1], ws.Dc[f], dz) : ws.q[f];
      ws.v_X[f] = v;
      double* phi = ws.phi.data() + f * st;
      const double A = g.A_face[f];
      const double FX = phi_c_from({left, kc}, {right, kc}, X_l, X_r, v, A, {phi, kc});
      ws.F_X[f] = FX;
      phi_s_face({left + kc, ks}, {right + kc, ks}, X_l, X_r, FX, ws.q[f], A, gam, dz, rho_X, diffusion_,
                 {phi + kc, ks});
    }

    if (bf) {
      bf->resize(st);
      for (std::size_t k = 0; k < st; ++k) {
        bf->top[k] = ws.phi[k];
        bf->bottom[k] = ws.phi[(nf - 1) * st + k];
        bf->feed[k] = (k < kc ? in.C_f[k] : in.S_f[k - kc]) * in.Q_f;
      }
    }

    const auto jf = static_cast<std::size_t>(g.feed_cell);
    for (std::size_t j = 0; j < nc; ++j) {
      const double vol = g.A_cell[j] * dz;
      const double* up = ws.phi.data() + j * st;
      const double* down = ws.phi.data() + (j + 1) * st;
      double* out = du.data() + j * st;
      for (std::size_t k = 0; k < st; ++k) {
        out[k] = -(down[k] - up[k]) / vol;
      }
      if (j == jf) {
        for (std::size_t k = 0; k < kc; ++k) out[k] += in.C_f[k] * in.Q_f / vol;
        for (std::size_t k = 0; k < ks; ++k) out[kc + k] += in.S_f[k] * in.Q_f / vol;
      }
      if (g.gamma_cell[j]) {
        const double* c = u.data() + j * st;
        reactions_->rates({c, kc}, {c + kc, ks}, {ws.R.data(), kc}, {ws.R.data() + kc, ks});
        for (std::size_t k = 0; k < st; ++k) {
          out[k] += ws.R[k];
          if (bf) bf->reaction[k] += vol * ws.R[k];
        }
      }
    }
  }

  /// Convenience wrapper allocating its own scratch.
  State rhs(const State& s, const MolInputs& in, BoundaryFluxes* bf = nullptr) const {
    State out(layout_);
    MolWorkspace ws;
    rhs(s.values(), in, out.values(), ws, bf);
    return out;
  }

  /// Per-face fluxes of `s`, for diagnostics.
  FaceFluxes face_fluxes(const State& s, const MolInputs& in) const {
    MolWorkspace ws;
    std::vector<double> du(layout_.size());
    rhs(s.values(), in, du, ws);
    FaceFluxes out;
    const std::size_t nf = grid_.num_faces();
    const std::size_t kc = layout_.k_C;
    const std::size_t st = layout_.stride();
    out.F_X = ws.F_X;
    out.v_X = ws.v_X;
    out.J_C.assign(nf, 0.0);
    for (std::size_t f = 0; f < nf; ++f) {
      if (grid_.gamma_face[f]) out.J_C[f] = (ws.Dc[f] - ws.Dc[f - 1]) / grid_.dz;
      for (std::size_t k = 0; k < st; ++k) {
        (k < kc ? out.phi_C : out.phi_S).push_back(ws.phi[f * st + k]);
      }
    }
    return out;
  }

 private:
  Grid grid_;
  Constitutive law_;
  std::shared_ptr<const ReactionModel> reactions_;
  std::vector<double> diffusion_;
  Layout layout_;
};

inline MolProblem make_problem(const Scenario& sc, int N, const Constitutive& law) {
  return MolProblem(build_grid(sc, N), law, make_reaction_model(sc), sc.diffusion);
}

/// ODE right-hand side bound to a scenario's schedules, callable as
/// f(u, du, t) by external integrators. Inputs outside the admissible set are
/// projected back (and counted) or rejected, depending on the policy.
class MolSystem {
 public:
  MolSystem(std::shared_ptr<const MolProblem> problem, const Scenario& sc,
            OmegaPolicy policy = OmegaPolicy::clamp)
      : problem_(std::move(problem)), Q_f_(sc.Q_f), Q_u_(sc.Q_u), C_f_(sc.C_f), S_f_(sc.S_f), policy_(policy) {}

  void operator()(const std::vector<double>& u, std::vector<double>& du, double t) {
    du.resize(u.size());
    const double X_max = problem_->constitutive().X_max();
    std::span<const double> input = u;
    if (policy_ != OmegaPolicy::count) {
      State probe(problem_->layout(), u);
      if (auto v = find_omega_violation(probe, X_max, 0.0)) {
        if (policy_ == OmegaPolicy::strict) {
          throw InvariantViolation(*v);
        }
        scratch_ = u;
        clamps_ += clamp_to_omega(scratch_, problem_->layout(), X_max);
        input = scratch_;
      }
    }
    const MolInputs in{Q_f_.at(t), Q_u_.at(t), C_f_.at(t), S_f_.at(t)};
    problem_->rhs(input, in, du, ws_);
  }

  std::size_t clamp_events() const { return clamps_; }
  const MolProblem& problem() const { return *problem_; }

 private:
  std::shared_ptr<const MolProblem> problem_;
  ScalarSchedule Q_f_;
  ScalarSchedule Q_u_;
  VectorSchedule C_f_;
  VectorSchedule S_f_;
  OmegaPolicy policy_;
  MolWorkspace ws_;
  std::vector<double> scratch_;
  std::size_t clamps_ = 0;
};

}  // namespace settler
