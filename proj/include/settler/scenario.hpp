#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "settler/constitutive.hpp"
#include "settler/grid.hpp"
#include "settler/reactions.hpp"
#include "settler/schedule.hpp"
#include "settler/state.hpp"

namespace settler {

inline constexpr double kHour = 3600.0;
inline constexpr double kCubicMetresPerHour = 1.0 / 3600.0;

struct ReactionConfig {
  enum class Kind { denitrification, none };
  Kind kind = Kind::denitrification;
  DenitrificationParams denitrification;

  bool operator==(const ReactionConfig&) const = default;
};

struct RunControls {
  int N = 100;
  double T = 0.0;        // s
  double cadence = 0.0;  // s; 0 = initial and final snapshots only

  bool operator==(const RunControls&) const = default;
};

/// Everything needed to run one simulation, in SI units (s, m, m^3/s, kg/m^3).
struct Scenario {
  std::string name;
  AreaProfile area;
  double H = 1.0;
  double B = 3.0;
  FaceAreaMode face_mode = FaceAreaMode::average;
  ScalarSchedule Q_f;
  ScalarSchedule Q_u;
  VectorSchedule C_f;
  VectorSchedule S_f;
  std::vector<DepthProfile> C0;
  std::vector<DepthProfile> S0;
  ConstitutiveParams constitutive;
  ReactionConfig reactions;
  std::vector<double> diffusion;  // d^(k), m^2/s, one per soluble
  RunControls run;

  std::size_t k_C() const { return C0.size(); }
  std::size_t k_S() const { return S0.size(); }

  bool operator==(const Scenario&) const = default;
};

inline std::shared_ptr<const ReactionModel> make_reaction_model(const Scenario& sc) {
  if (sc.reactions.kind == ReactionConfig::Kind::none) {
    return std::make_shared<NoReactions>(sc.k_C(), sc.k_S());
  }
  return std::make_shared<Denitrification>(sc.reactions.denitrification, sc.constitutive.X_max);
}

/// Largest value a scalar schedule takes on [0, T].
inline double schedule_max(const ScalarSchedule& s, double T) {
  double m = s.values().front();
  for (std::size_t i = 0; i < s.times().size(); ++i) {
    if (s.times()[i] <= T) m = std::max(m, s.values()[i]);
  }
  return m;
}

inline std::vector<double> merged_breakpoints(const Scenario& sc, double horizon) {
  std::vector<double> out;
  for (const auto* s : {&sc.Q_f, &sc.Q_u}) {
    const auto b = s->breakpoints(horizon);
    out.insert(out.end(), b.begin(), b.end());
  }
  for (const auto* s : {&sc.C_f, &sc.S_f}) {
    const auto b = s->breakpoints(horizon);
    out.insert(out.end(), b.begin(), b.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Throws std::invalid_argument describing the first broken requirement.
inline void validate_scenario(const Scenario& sc) {
  sc.constitutive.validate();
  sc.area.validate(sc.H, sc.B);
  if (sc.C0.empty()) {
    throw std::invalid_argument("scenario: at least one solid component is required");
  }
  if (sc.Q_f.empty() || sc.Q_u.empty() || sc.C_f.empty() || sc.S_f.empty()) {
    throw std::invalid_argument("scenario: feed and underflow schedules are required");
  }
  std::vector<double> times = sc.Q_f.times();
  times.insert(times.end(), sc.Q_u.times().begin(), sc.Q_u.times().end());
  for (double t : times) {
    const double qf = sc.Q_f.at(t);
    const double qu = sc.Q_u.at(t);
    if (!(qu > 0.0) || !(qf >= qu)) {
      throw std::invalid_argument("scenario: require Q_f >= Q_u > 0 (violated at t = " + std::to_string(t) +
                                  " s)");
    }
  }
  for (const auto& c : sc.C_f.values()) {
    if (c.size() != sc.k_C()) {
      throw std::invalid_argument("scenario: C_f length differs from the number of solids");
    }
    double sum = 0.0;
    for (double v : c) {
      if (!(v >= 0.0)) throw std::invalid_argument("scenario: C_f must be nonnegative");
      sum += v;
    }
    if (sum > sc.constitutive.X_max) {
      throw std::invalid_argument("scenario: feed solids exceed X_max");
    }
  }
  for (const auto& s : sc.S_f.values()) {
    if (s.size() != sc.k_S()) {
      throw std::invalid_argument("scenario: S_f length differs from the number of solubles");
    }
    for (double v : s) {
      if (!(v >= 0.0)) throw std::invalid_argument("scenario: S_f must be nonnegative");
    }
  }
  if (sc.diffusion.size() != sc.k_S()) {
    throw std::invalid_argument("scenario: need one diffusion coefficient per soluble");
  }
  for (double d : sc.diffusion) {
    if (!(d >= 0.0)) throw std::invalid_argument("scenario: diffusion coefficients must be nonnegative");
  }
  for (const auto& p : sc.C0) p.validate(-sc.H, sc.B);
  for (const auto& p : sc.S0) p.validate(-sc.H, sc.B);
  if (sc.reactions.kind == ReactionConfig::Kind::denitrification) {
    sc.reactions.denitrification.validate();
    if (sc.k_C() != 2 || sc.k_S() != 3) {
      throw std::invalid_argument("scenario: denitrification needs 2 solids and 3 solubles");
    }
  }
  if (sc.run.N < 2 || !(sc.run.T >= 0.0) || !(sc.run.cadence >= 0.0)) {
    throw std::invalid_argument("scenario: require N >= 2, T >= 0, cadence >= 0");
  }
}

inline Grid build_grid(const Scenario& sc, int N) { return build_grid(sc.area, sc.H, sc.B, N, sc.face_mode); }

/// Cell averages of the initial profiles on all N+2 cells (constant extension
/// outside the vessel). Throws if the sampled state leaves the admissible set.
inline State initial_state(const Scenario& sc, const Grid& g) {
  State s(Layout{g.num_cells(), sc.k_C(), sc.k_S()});
  const double top = -sc.H;
  const double bottom = sc.B;
  for (std::size_t j = 0; j < g.num_cells(); ++j) {
    const double lo = g.z_cell[j] - 0.5 * g.dz;
    const double hi = g.z_cell[j] + 0.5 * g.dz;
    for (std::size_t k = 0; k < sc.k_C(); ++k) s.C(j, k) = sc.C0[k].cell_average(lo, hi, top, bottom);
    for (std::size_t k = 0; k < sc.k_S(); ++k) s.S(j, k) = sc.S0[k].cell_average(lo, hi, top, bottom);
  }
  if (const auto v = find_omega_violation(s, sc.constitutive.X_max, 0.0)) {
    throw std::invalid_argument("scenario: initial data outside the admissible set at cell " +
                                std::to_string(v->cell) + " (" + v->what + " = " + std::to_string(v->value) + ")");
  }
  return s;
}

/// Q_face = Q_u - Q_f above the feed layer, Q_u at and below; q = Q_face / A_face.
inline void face_bulk_flow(const Grid& g, double Q_f, double Q_u, std::vector<double>& Q_face,
                           std::vector<double>& q_face) {
  Q_face.resize(g.num_faces());
  q_face.resize(g.num_faces());
  for (std::size_t f = 0; f < g.num_faces(); ++f) {
    Q_face[f] = g.face_above_feed(f) ? Q_u - Q_f : Q_u;
    q_face[f] = Q_face[f] / g.A_face[f];
  }
}

inline double effluent_flow(double Q_f, double Q_u) { return Q_f - Q_u; }
inline double effluent_flow(const Scenario& sc, double t) { return effluent_flow(sc.Q_f.at(t), sc.Q_u.at(t)); }

// -- builtin scenarios ----------------------------------------------------

namespace detail {

inline ScalarSchedule hourly(std::vector<double> hours, std::vector<double> m3h) {
  for (auto& h : hours) h *= kHour;
  for (auto& q : m3h) q *= kCubicMetresPerHour;
  return ScalarSchedule(std::move(hours), std::move(m3h));
}

inline VectorSchedule split_feed(std::vector<double> hours, const std::vector<double>& X) {
  std::vector<std::vector<double>> values;
  for (double x : X) values.push_back({x * 5.0 / 7.0, x * 2.0 / 7.0});
  for (auto& h : hours) h *= kHour;
  return VectorSchedule(std::move(hours), std::move(values));
}

inline DepthProfile two_piece(double top, double bottom, double z, double a0, double b0, double a1, double b1) {
  return DepthProfile({{top, z, a0, b0}, {z, bottom, a1, b1}});
}

inline Scenario common_base(const std::string& name) {
  Scenario sc;
  sc.name = name;
  sc.S_f = VectorSchedule::constant({6.0e-3, 9.0e-4, 0.0});
  sc.diffusion = {0.0, 0.0, 0.0};
  return sc;
}

}  // namespace detail

inline Scenario example1() {
  using detail::two_piece;
  Scenario sc = detail::common_base("example1");
  sc.H = 1.0;
  sc.B = 3.0;
  sc.area = AreaProfile::constant(sc.H, sc.B, 400.0);
  sc.Q_f = detail::hourly({0, 2, 4}, {450, 130, 65});
  sc.Q_u = detail::hourly({0, 2, 4, 7}, {30, 100, 35, 50});
  sc.C_f = detail::split_feed({0, 2, 4, 7}, {1.0, 0.5, 3.0, 4.0});
  // X0 = 0 above z = 0.5, 3.8 z + 1.6 below, split 5:2
  sc.C0 = {two_piece(-1.0, 3.0, 0.5, 0.0, 0.0, 1.6 * 5.0 / 7.0, 3.8 * 5.0 / 7.0),
           two_piece(-1.0, 3.0, 0.5, 0.0, 0.0, 1.6 * 2.0 / 7.0, 3.8 * 2.0 / 7.0)};
  sc.S0 = {two_piece(-1.0, 3.0, 0.5, 0.006, 0.0, 0.0, 0.0), two_piece(-1.0, 3.0, 0.5, 0.0, 0.0, -0.06, 0.12),
           two_piece(-1.0, 3.0, 0.5, 0.0, 0.0, 0.006, 0.0)};
  sc.run = {128, 9.0 * kHour, 1.0 * kHour};
  return sc;
}

inline Scenario example2() {
  using detail::two_piece;
  Scenario sc = detail::common_base("example2");
  sc.H = 1.0;
  sc.B = 4.0;
  sc.area = AreaProfile::v7like();
  sc.Q_f = detail::hourly({0, 4, 6}, {100, 150, 250});
  sc.Q_u = detail::hourly({0, 4, 6, 9}, {10, 100, 50, 5});
  sc.C_f = detail::split_feed({0, 2, 4, 7}, {4.0, 2.0, 5.0, 6.0});
  sc.C0 = {two_piece(-1.0, 4.0, 0.5, 0.0, 0.0, 20.0 / 7.0, 0.0),
           two_piece(-1.0, 4.0, 0.5, 0.0, 0.0, 8.0 / 7.0, 0.0)};
  sc.S0 = {two_piece(-1.0, 4.0, 0.5, 0.006, 0.0, 0.0, 0.0), two_piece(-1.0, 4.0, 0.5, 0.0, 0.0, -0.06, 0.12),
           two_piece(-1.0, 4.0, 0.5, 0.0, 0.0, 0.006, 0.0)};
  sc.run = {100, 20.0 * kHour, 1.0 * kHour};
  return sc;
}

/// Examples 3-5 share example2's vessel and flows; they differ in diffusion.
inline Scenario diffusion_example(int which) {
  using detail::two_piece;
  Scenario sc = example2();
  sc.name = "example" + std::to_string(which);
  // S_NO3 is 0.006 up to and including z = 0.5
  sc.S0 = {DepthProfile({{-1.0, 0.5, 0.006, 0.0}, {0.5, 4.0, 0.0, 0.0}}),
           two_piece(-1.0, 4.0, 0.5, 0.0, 0.0, -0.06, 0.12),
           DepthProfile({{-1.0, 0.5, 0.0, 0.0}, {0.5, 1.5, 0.003, 0.0}, {1.5, 4.0, 0.006, 0.0}})};
  switch (which) {
    case 3:
      sc.diffusion = {0.0, 0.0, 0.0};
      break;
    case 4:
      sc.diffusion = {0.0, 0.0, 3e-6};
      break;
    case 5:
      sc.diffusion = {1e-5, 5e-5, 3e-6};
      break;
    default:
      throw std::invalid_argument("diffusion_example: expected 3, 4 or 5");
  }
  sc.run = {100, 3.0 * kHour, 0.5 * kHour};
  return sc;
}

inline std::vector<std::string> builtin_scenario_names() {
  return {"example1", "example2", "example3", "example4", "example5"};
}

inline bool is_builtin_scenario(const std::string& name) {
  const auto names = builtin_scenario_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

inline Scenario builtin_scenario(const std::string& name) {
  if (name == "example1") return example1();
  if (name == "example2") return example2();
  if (name == "example3") return diffusion_example(3);
  if (name == "example4") return diffusion_example(4);
  if (name == "example5") return diffusion_example(5);
  throw std::invalid_argument("unknown builtin scenario '" + name + "'");
}

}  // namespace settler
