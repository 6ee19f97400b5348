#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "settler/constitutive.hpp"
#include "settler/grid.hpp"
#include "settler/methodxp.hpp"
#include "settler/reactions.hpp"
#include "settler/scenario.hpp"
#include "settler/state.hpp"
#include "settler/stepper.hpp"

namespace settler {

/// Coarse cell value = mean of its fine children. Requires N | fine.size().
inline std::vector<double> project_fine_to_coarse(std::span<const double> fine, std::size_t N) {
  if (N == 0 || fine.size() % N != 0) {
    throw std::invalid_argument("project_fine_to_coarse: grids do not nest");
  }
  const std::size_t ratio = fine.size() / N;
  std::vector<double> out(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    double s = 0.0;
    for (std::size_t c = 0; c < ratio; ++c) s += fine[i * ratio + c];
    out[i] = s / static_cast<double>(ratio);
  }
  return out;
}

/// Interior values (cells 1..N) of one component; k indexes solids then solubles.
inline std::vector<double> component_profile(const State& s, std::size_t k) {
  std::vector<double> out(s.cells() - 2);
  for (std::size_t j = 1; j + 1 < s.cells(); ++j) out[j - 1] = s.values()[j * s.layout().stride() + k];
  return out;
}

/// Projects the interior of a fine state onto N interior cells; outer cells are copied.
inline State project_state(const State& fine, std::size_t N) {
  State out(Layout{N + 2, fine.k_C(), fine.k_S()});
  const std::size_t st = fine.layout().stride();
  for (std::size_t k = 0; k < st; ++k) {
    const auto coarse = project_fine_to_coarse(component_profile(fine, k), N);
    for (std::size_t j = 0; j < N; ++j) out.values()[(j + 1) * st + k] = coarse[j];
    out.values()[k] = fine.values()[k];
    out.values()[(N + 1) * st + k] = fine.values()[(fine.cells() - 1) * st + k];
  }
  return out;
}

inline double l1_norm(std::span<const double> v, double dz) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return dz * s;
}

/// Sum over components of ||u_k - ref_k||_1 / ||ref_k||_1 on the interior
/// cells. Components whose reference norm is zero are skipped and named in `skipped`.
inline double e_n_rel(const State& coarse, const State& reference, double dz,
                      std::vector<std::string>* skipped = nullptr) {
  if (coarse.layout() != reference.layout()) {
    throw std::invalid_argument("e_n_rel: solutions live on different grids");
  }
  double e = 0.0;
  const std::size_t st = coarse.layout().stride();
  for (std::size_t k = 0; k < st; ++k) {
    const auto u = component_profile(coarse, k);
    const auto r = component_profile(reference, k);
    const double rn = l1_norm(r, dz);
    if (!(rn > 0.0)) {
      if (skipped) skipped->push_back("component " + std::to_string(k) + " has a zero reference norm");
      continue;
    }
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) d += std::abs(u[i] - r[i]);
    e += dz * d / rn;
  }
  return e;
}

inline double theta(double e_N1, double e_N2, double N1, double N2) {
  return -std::log(e_N1 / e_N2) / std::log(N1 / N2);
}

/// Eigenvalues of the flux Jacobian of the solids-liquid system.
inline std::pair<double, double> eigenvalues(const Constitutive& law, double X, double q, double gamma) {
  const double fp = law.batch_flux_derivative(X);
  const double f = law.batch_flux(X);
  return {q + gamma * fp, q - gamma * f / (law.rho_X() - X)};
}

inline double mass_balance_audit(const MassAudit& a) { return a.max_relative; }

inline double total_variation(std::span<const double> v) {
  double tv = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) tv += std::abs(v[i] - v[i - 1]);
  return tv;
}

inline double loglog_slope(double x0, double y0, double x1, double y1) {
  return std::log(y1 / y0) / std::log(x1 / x0);
}

struct CflCurvePoint {
  double dz = 0.0;
  double dt_cs = 0.0;
  double dt_xp = 0.0;
};

/// Both time-step budgets over a list of layer depths for a constant area A.
inline std::vector<CflCurvePoint> cfl_curve(const Constitutive& law, const ReactionBounds& rb, double A,
                                            double Qf_norm, double q_norm, std::span<const double> dzs,
                                            std::span<const double> diffusion, double safety = 1.0) {
  std::vector<CflCurvePoint> out;
  for (double dz : dzs) {
    const auto cs = cfl_budget(dz, A, 1.0, 2.0, law, rb, Qf_norm, diffusion, safety);
    const auto xp = xp_cfl(dz, law, rb, q_norm, safety);
    out.push_back({dz, cs.dt_max, xp.dt_max});
  }
  return out;
}

/// n logarithmically spaced values from lo to hi inclusive.
inline std::vector<double> log_space(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    out[i] = lo * std::pow(hi / lo, s);
  }
  return out;
}

struct ErrorRow {
  double t = 0.0;
  int N = 0;
  double e = 0.0;
  std::optional<double> theta;
  double cpu_seconds = 0.0;
};

struct ConvergenceStudy {
  int N_ref = 0;
  double ref_cpu_seconds = 0.0;
  std::vector<ErrorRow> rows;  // grouped by t, N ascending
  std::vector<std::string> warnings;
};

/// Errors of Method CS (or XP) runs against a fine CS reference at the given times.
inline ConvergenceStudy convergence_study(const Scenario& sc, const std::vector<int>& Ns, int N_ref,
                                          const std::vector<double>& times, bool use_xp = false,
                                          double safety = 0.95) {
  validate_scenario(sc);
  const Constitutive law(sc.constitutive);
  SimulationOptions opt;
  opt.safety = safety;
  opt.horizon = *std::max_element(times.begin(), times.end());
  opt.cadence = 0.0;
  opt.output_times = times;

  ConvergenceStudy study;
  study.N_ref = N_ref;
  MemorySink ref;
  const auto ref_rep = simulate(sc, N_ref, opt, &ref, &law);
  study.ref_cpu_seconds = ref_rep.wall_seconds;

  std::vector<MemorySink> sinks(Ns.size());
  std::vector<double> cpu(Ns.size());
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    if (N_ref % Ns[i] != 0) throw std::invalid_argument("convergence_study: N must divide N_ref");
    const auto rep = use_xp ? simulate_xp(sc, Ns[i], opt, &sinks[i], &law) : simulate(sc, Ns[i], opt, &sinks[i], &law);
    cpu[i] = rep.wall_seconds;
  }
  for (double t : times) {
    const State& fine = ref.at(t);
    std::optional<double> prev;
    for (std::size_t i = 0; i < Ns.size(); ++i) {
      const double dz = (sc.H + sc.B) / Ns[i];
      const State projected = project_state(fine, static_cast<std::size_t>(Ns[i]));
      ErrorRow row;
      row.t = t;
      row.N = Ns[i];
      row.e = e_n_rel(sinks[i].at(t), projected, dz, &study.warnings);
      row.cpu_seconds = cpu[i];
      if (prev && i > 0) row.theta = theta(row.e, *prev, Ns[i], Ns[i - 1]);
      prev = row.e;
      study.rows.push_back(row);
    }
  }
  return study;
}

}  // namespace settler
