#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "settler/constitutive.hpp"
#include "settler/grid.hpp"
#include "settler/mol.hpp"
#include "settler/reactions.hpp"
#include "settler/scenario.hpp"
#include "settler/state.hpp"

namespace settler {

/// Time-step budget of the explicit scheme and the constants it is built from.
struct CflBudget {
  double beta1 = 0.0;  // 1/s
  double beta2 = 0.0;  // 1/s
  double dt_max = 0.0; // s, safety / max(beta1, beta2)
  double safety = 1.0;

  double dz = 0.0;
  double Qf_norm = 0.0;  // ||Q_f||_{inf,T}, m^3/s
  double A_min = 0.0;
  double M1 = 0.0;
  double M2 = 0.0;
  double vhs_sup = 0.0;
  double vhs_at_zero = 0.0;
  double vhs_prime_sup = 0.0;
  double dc_sup = 0.0;
  double big_dc_at_max = 0.0;
  double d_tilde = 0.0;
  double M_C = 0.0;
  double M_C_total = 0.0;
  double M_S = 0.0;
  double rho_X = 0.0;
  double X_max = 0.0;
};

inline CflBudget cfl_budget(double dz, double A_min, double M1, double M2, const Constitutive& law,
                            const ReactionBounds& rb, double Qf_norm, std::span<const double> diffusion,
                            double safety = 0.95) {
  if (!(A_min > 0.0)) {
    throw std::invalid_argument("cfl_budget: nonpositive cross-sectional area");
  }
  if (!(dz > 0.0) || !(safety > 0.0)) {
    throw std::invalid_argument("cfl_budget: require dz > 0 and safety > 0");
  }
  const auto& n = law.norms();
  CflBudget b;
  b.dz = dz;
  b.safety = safety;
  b.Qf_norm = Qf_norm;
  b.A_min = A_min;
  b.M1 = M1;
  b.M2 = M2;
  b.vhs_sup = n.vhs_sup;
  b.vhs_at_zero = n.vhs_at_zero;
  b.vhs_prime_sup = n.vhs_prime_sup;
  b.dc_sup = n.dc_sup;
  b.big_dc_at_max = n.big_dc_at_max;
  b.d_tilde = diffusion.empty() ? 0.0 : *std::max_element(diffusion.begin(), diffusion.end());
  b.M_C = rb.M_C;
  b.M_C_total = rb.M_C_total;
  b.M_S = rb.M_S;
  b.rho_X = law.rho_X();
  b.X_max = law.X_max();

  const double xm = b.X_max;
  const double feed = Qf_norm / (A_min * dz);
  const double dz2 = dz * dz;
  b.beta1 = feed + M1 / dz * (n.vhs_prime_sup * xm + n.vhs_at_zero) + M2 / dz2 * (n.dc_sup * xm + n.big_dc_at_max) +
            std::max(rb.M_C, rb.M_C_total);
  const double gap = b.rho_X - xm;
  b.beta2 = (b.rho_X + xm) / gap * feed + xm * M1 / gap * n.vhs_sup / dz + xm * M2 / gap * n.big_dc_at_max / dz2 +
            b.d_tilde * M2 / dz2 + rb.M_S;
  b.dt_max = safety / std::max(b.beta1, b.beta2);
  return b;
}

inline CflBudget cfl_max_dt(const Grid& g, const Constitutive& law, const ReactionModel& reactions,
                            double Qf_norm, std::span<const double> diffusion, double safety = 0.95) {
  return cfl_budget(g.dz, g.A_min, g.M1, g.M2, law, reactions.derivative_bounds(), Qf_norm, diffusion, safety);
}

/// One explicit Euler step U <- U + dt * rhs(U) with inputs frozen over the step.
inline void step_cs(const MolProblem& problem, std::span<double> u, double dt, const MolInputs& in,
                    MolWorkspace& ws, std::vector<double>& du, BoundaryFluxes* bf = nullptr) {
  du.resize(u.size());
  problem.rhs(u, in, du, ws, bf);
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] += dt * du[i];
  }
}

inline void step_cs(const MolProblem& problem, State& s, double dt, const MolInputs& in) {
  MolWorkspace ws;
  std::vector<double> du;
  step_cs(problem, s.values(), dt, in, ws, du);
}

// -- simulation driver ---------------------------------------------------

struct Snapshot {
  double t = 0.0;
  std::string method;
  const Grid* grid = nullptr;
  const State* state = nullptr;
  double Q_f = 0.0;  // schedule values at t
  double Q_u = 0.0;
};

class OutputSink {
 public:
  virtual ~OutputSink() = default;
  virtual void on_snapshot(const Snapshot& s) = 0;
};

/// Keeps every snapshot in memory.
class MemorySink final : public OutputSink {
 public:
  void on_snapshot(const Snapshot& s) override {
    times.push_back(s.t);
    states.push_back(*s.state);
  }
  std::vector<double> times;
  std::vector<State> states;

  /// Snapshot recorded at time t (within a relative 1e-9), or throws.
  const State& at(double t) const {
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (std::abs(times[i] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return states[i];
    }
    throw std::out_of_range("MemorySink: no snapshot at t = " + std::to_string(t));
  }
};

/// Cumulative inventory balance per component (solids then solubles), kg.
struct MassAudit {
  std::vector<double> initial;
  std::vector<double> final;
  std::vector<double> feed;
  std::vector<double> top;       // signed downward transport through the top face
  std::vector<double> bottom;    // signed downward transport through the bottom face
  std::vector<double> reaction;
  std::vector<double> throughput;
  std::vector<double> residual;  // final - initial - (feed + top - bottom + reaction)
  std::vector<double> relative;  // |residual| / throughput
  double max_relative = 0.0;
};

struct RunReport {
  std::string method;
  std::string scenario;
  int N = 0;
  double horizon = 0.0;
  double final_time = 0.0;
  std::size_t steps = 0;
  double dt_max = 0.0;
  double wall_seconds = 0.0;
  std::size_t omega_violations = 0;  // (cell, step) pairs outside the admissible set
  std::size_t clamp_events = 0;
  std::string first_violation;
  MassAudit audit;
};

struct SimulationOptions {
  double safety = 0.95;
  OmegaPolicy policy = OmegaPolicy::count;
  double slack = 1e-12;
  double horizon = -1.0;  // < 0: scenario run.T
  double cadence = -1.0;  // < 0: scenario run.cadence; 0: initial and final only
  std::vector<double> output_times;  // extra snapshot times
  double dt_override = 0.0;          // > 0: fixed step instead of the budget
};

inline double total_mass(const State& s, const Grid& g, std::size_t component) {
  double m = 0.0;
  for (std::size_t j = 0; j < s.cells(); ++j) {
    m += g.A_cell[j] * g.dz * s.values()[j * s.layout().stride() + component];
  }
  return m;
}

namespace detail {

/// Sorted, de-duplicated event times in (0, T]: schedule jumps, output ticks, T.
inline std::vector<double> event_times(const Scenario& sc, double T, double cadence,
                                       const std::vector<double>& extra, std::vector<double>& outputs) {
  outputs.clear();
  if (cadence > 0.0) {
    for (long i = 1;; ++i) {
      const double t = cadence * static_cast<double>(i);
      if (t >= T * (1.0 - 1e-12)) break;
      outputs.push_back(t);
    }
  }
  for (double t : extra) {
    if (t > 0.0 && t < T) outputs.push_back(t);
  }
  if (T > 0.0) outputs.push_back(T);
  std::sort(outputs.begin(), outputs.end());
  outputs.erase(std::unique(outputs.begin(), outputs.end()), outputs.end());
  std::vector<double> events = merged_breakpoints(sc, T);
  events.insert(events.end(), outputs.begin(), outputs.end());
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());
  return events;
}

struct KahanSum {
  double sum = 0.0;
  double c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

}  // namespace detail

/// Method contract for `drive`: dt_max(), advance(t, dt, inputs, bf),
/// state(), omega_check(policy, slack, report), name().
template <class Method>
RunReport drive(Method& m, const Scenario& sc, const SimulationOptions& opt, OutputSink* sink) {
  const auto start = std::chrono::steady_clock::now();
  const Grid& g = m.grid();
  const double T = opt.horizon >= 0.0 ? opt.horizon : sc.run.T;
  const double cadence = opt.cadence >= 0.0 ? opt.cadence : sc.run.cadence;
  std::vector<double> outputs;
  const auto events = detail::event_times(sc, T, cadence, opt.output_times, outputs);

  RunReport rep;
  rep.method = m.name();
  rep.scenario = sc.name;
  rep.N = g.N;
  rep.horizon = T;
  rep.dt_max = opt.dt_override > 0.0 ? opt.dt_override : m.dt_max();
  if (!(rep.dt_max > 0.0) || !std::isfinite(rep.dt_max)) {
    throw std::runtime_error("simulate: no admissible time step");
  }

  const std::size_t ncomp = sc.k_C() + sc.k_S();
  auto& a = rep.audit;
  a.initial.resize(ncomp);
  for (std::size_t k = 0; k < ncomp; ++k) a.initial[k] = total_mass(m.state(), g, k);
  std::vector<detail::KahanSum> feed(ncomp), top(ncomp), bottom(ncomp), react(ncomp), through(ncomp);

  auto emit = [&](double t) {
    if (!sink) return;
    sink->on_snapshot(Snapshot{t, rep.method, &g, &m.state(), sc.Q_f.at(t), sc.Q_u.at(t)});
  };
  emit(0.0);

  double t = 0.0;
  std::size_t next_event = 0;
  std::size_t next_output = 0;
  BoundaryFluxes bf;
  std::vector<double> C_f, S_f;
  while (next_event < events.size()) {
    const double target = events[next_event];
    double dt = std::min(rep.dt_max, target - t);
    bool hits = dt >= target - t;
    // avoid a sliver step just before an event
    if (!hits && target - t - dt < 1e-9 * rep.dt_max) {
      dt = target - t;
      hits = true;
    }
    const MolInputs in = averaged_inputs(sc, t, dt, C_f, S_f);
    m.advance(t, dt, in, &bf);
    for (std::size_t k = 0; k < ncomp; ++k) {
      feed[k].add(dt * bf.feed[k]);
      top[k].add(dt * bf.top[k]);
      bottom[k].add(dt * bf.bottom[k]);
      react[k].add(dt * bf.reaction[k]);
      through[k].add(dt * (std::abs(bf.feed[k]) + std::abs(bf.top[k]) + std::abs(bf.bottom[k]) +
                           std::abs(bf.reaction[k])));
    }
    t = hits ? target : t + dt;
    ++rep.steps;
    m.omega_check(opt.policy, opt.slack, rep);
    if (hits) {
      ++next_event;
      if (next_output < outputs.size() && outputs[next_output] == target) {
        emit(t);
        ++next_output;
      }
    }
  }
  rep.final_time = t;

  a.final.resize(ncomp);
  a.feed.resize(ncomp);
  a.top.resize(ncomp);
  a.bottom.resize(ncomp);
  a.reaction.resize(ncomp);
  a.throughput.resize(ncomp);
  a.residual.resize(ncomp);
  a.relative.resize(ncomp);
  for (std::size_t k = 0; k < ncomp; ++k) {
    a.final[k] = total_mass(m.state(), g, k);
    a.feed[k] = feed[k].sum;
    a.top[k] = top[k].sum;
    a.bottom[k] = bottom[k].sum;
    a.reaction[k] = react[k].sum;
    a.throughput[k] = through[k].sum;
    a.residual[k] = (a.final[k] - a.initial[k]) - (a.feed[k] + a.top[k] - a.bottom[k] + a.reaction[k]);
    const double scale = a.throughput[k] > 0.0 ? a.throughput[k] : std::max(std::abs(a.initial[k]), 1e-300);
    a.relative[k] = std::abs(a.residual[k]) / scale;
    a.max_relative = std::max(a.max_relative, a.relative[k]);
  }
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

inline void record_violations(State& s, const Layout& layout, double X_max, OmegaPolicy policy, double slack,
                              RunReport& rep) {
  const std::size_t bad = count_omega_violations(s, X_max, slack);
  if (bad == 0) return;
  if (rep.first_violation.empty()) {
    const auto v = find_omega_violation(s, X_max, slack);
    rep.first_violation = "step " + std::to_string(rep.steps) + ", cell " + std::to_string(v->cell) + ": " +
                          v->what + " = " + std::to_string(v->value);
  }
  rep.omega_violations += bad;
  if (policy == OmegaPolicy::strict) {
    throw InvariantViolation(*find_omega_violation(s, X_max, slack));
  }
  if (policy == OmegaPolicy::clamp) {
    rep.clamp_events += clamp_to_omega(s.values(), layout, X_max);
  }
}

/// Method CS bound to one problem and state.
class CsMethod {
 public:
  CsMethod(std::shared_ptr<const MolProblem> problem, State initial, double Qf_norm, double safety)
      : problem_(std::move(problem)), state_(std::move(initial)) {
    budget_ = cfl_max_dt(problem_->grid(), problem_->constitutive(), problem_->reactions(), Qf_norm,
                         problem_->diffusion(), safety);
  }

  std::string name() const { return "CS"; }
  const Grid& grid() const { return problem_->grid(); }
  const State& state() const { return state_; }
  State& state() { return state_; }
  const CflBudget& budget() const { return budget_; }
  double dt_max() const { return budget_.dt_max; }

  void advance(double, double dt, const MolInputs& in, BoundaryFluxes* bf) {
    step_cs(*problem_, state_.values(), dt, in, ws_, du_, bf);
  }

  void omega_check(OmegaPolicy policy, double slack, RunReport& rep) {
    record_violations(state_, problem_->layout(), problem_->constitutive().X_max(), policy, slack, rep);
  }

 private:
  std::shared_ptr<const MolProblem> problem_;
  State state_;
  CflBudget budget_;
  MolWorkspace ws_;
  std::vector<double> du_;
};

/// Runs Method CS from the scenario's initial data to the horizon.
inline RunReport simulate(const Scenario& sc, int N, const SimulationOptions& opt = {}, OutputSink* sink = nullptr,
                          const Constitutive* law = nullptr, State* final_state = nullptr) {
  validate_scenario(sc);
  const Constitutive own = law ? *law : Constitutive(sc.constitutive);
  auto problem = std::make_shared<const MolProblem>(make_problem(sc, N, own));
  const double T = opt.horizon >= 0.0 ? opt.horizon : sc.run.T;
  CsMethod m(problem, initial_state(sc, problem->grid()), schedule_max(sc.Q_f, T), opt.safety);
  RunReport rep = drive(m, sc, opt, sink);
  if (final_state) *final_state = m.state();
  return rep;
}

}  // namespace settler
