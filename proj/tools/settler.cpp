// settler: command-line driver for the clarifier-thickener simulator.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "settler/settler.hpp"

namespace fs = std::filesystem;
using namespace settler;

namespace {

enum class LogLevel { quiet, info, debug };

LogLevel log_level() {
  const char* v = std::getenv("SETTLER_LOG");
  if (!v) return LogLevel::info;
  const std::string s(v);
  if (s == "quiet") return LogLevel::quiet;
  if (s == "debug") return LogLevel::debug;
  return LogLevel::info;
}

void info(const std::string& msg) {
  if (log_level() != LogLevel::quiet) std::cerr << msg << '\n';
}

void debug(const std::string& msg) {
  if (log_level() == LogLevel::debug) std::cerr << msg << '\n';
}

struct Common {
  std::string scenario = "example1";
  int cells = 0;
  double horizon_h = -1.0;
  std::string out = ".";
  double safety = 0.95;
  std::string z_mode;
  std::vector<double> diffusion;
  bool no_reactions = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--scenario", c.scenario, "builtin name (example1..example5) or JSON file")->capture_default_str();
  cmd->add_option("--cells", c.cells, "interior cells N (default: scenario value)")->check(CLI::Range(2, 1 << 20));
  cmd->add_option("--horizon", c.horizon_h, "simulated time in hours (default: scenario value)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--out", c.out, "output directory")->capture_default_str();
  cmd->add_option("--safety", c.safety, "factor applied to the maximal stable time step")
      ->check(CLI::Range(1e-6, 1.0))
      ->capture_default_str();
  cmd->add_option("--z-mode", c.z_mode, "reaction cutoff near X_max")->check(CLI::IsMember({"identity", "ramp"}));
  cmd->add_option("--diffusion", c.diffusion, "soluble diffusion coefficients d1,d2,... in m^2/s")->delimiter(',');
  cmd->add_flag("--no-reactions", c.no_reactions, "disable the reaction terms");
}

Scenario prepare(const Common& c) {
  Scenario sc = load_scenario(c.scenario);
  if (c.cells > 0) sc.run.N = c.cells;
  if (c.horizon_h >= 0.0) sc.run.T = c.horizon_h * kHour;
  if (c.z_mode == "ramp") sc.reactions.denitrification.z_mode = ZMode::ramp;
  if (c.z_mode == "identity") sc.reactions.denitrification.z_mode = ZMode::identity;
  if (!c.diffusion.empty()) sc.diffusion = c.diffusion;
  if (c.no_reactions) sc.reactions.kind = ReactionConfig::Kind::none;
  validate_scenario(sc);
  return sc;
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream os(fs::path(dir) / name);
  if (!os) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
  return os;
}

int run_simulate(const Common& c, const std::string& method, double cadence_h, bool debug_invariants) {
  const Scenario sc = prepare(c);
  SimulationOptions opt;
  opt.safety = c.safety;
  opt.policy = debug_invariants ? OmegaPolicy::strict : OmegaPolicy::count;
  if (cadence_h >= 0.0) opt.cadence = cadence_h * kHour;
  const Constitutive law(sc.constitutive);

  auto profiles = open_out(c.out, "profiles.csv");
  auto outputs = open_out(c.out, "outputs.csv");
  CsvSink sink(profiles, outputs, law.rho_L(), law.density_ratio());
  info("simulating " + sc.name + " with method " + method + ", N = " + std::to_string(sc.run.N));
  const RunReport rep =
      method == "xp" ? simulate_xp(sc, sc.run.N, opt, &sink, &law) : simulate(sc, sc.run.N, opt, &sink, &law);
  auto report = open_out(c.out, "report.json");
  report << report_to_json(rep).dump(2) << '\n';
  info("steps " + std::to_string(rep.steps) + ", dt " + format_double(rep.dt_max) + " s, mass residual " +
       format_double(rep.audit.max_relative) + ", wall " + format_double(rep.wall_seconds) + " s");
  if (rep.omega_violations > 0) {
    std::cerr << "error: " << rep.omega_violations << " invariant-region violations (first: " << rep.first_violation
              << ")\n";
    return 2;
  }
  return 0;
}

int run_converge(const Common& c, std::vector<int> levels, int reference, std::vector<double> times_h,
                 const std::string& method) {
  const Scenario sc = prepare(c);
  std::vector<double> times;
  for (double t : times_h) times.push_back(t * kHour);
  info("convergence study of " + sc.name + " against N_ref = " + std::to_string(reference));
  const auto study = convergence_study(sc, levels, reference, times, method == "xp", c.safety);
  for (const auto& w : study.warnings) debug("warning: " + w);
  auto os = open_out(c.out, "errors.csv");
  write_error_table(os, study);
  for (const auto& r : study.rows) {
    info("t = " + format_double(r.t / kHour) + " h, N = " + std::to_string(r.N) + ", e = " + format_double(r.e) +
         (r.theta ? ", theta = " + format_double(*r.theta) : std::string()));
  }
  return 0;
}

int run_cfl_curve(const Common& c, double dz_min, double dz_max, int points) {
  const Scenario sc = prepare(c);
  const Constitutive law(sc.constitutive);
  const auto rm = make_reaction_model(sc);
  const double T = sc.run.T;
  const Grid g = build_grid(sc, sc.run.N);
  const auto pts = cfl_curve(law, rm->derivative_bounds(), g.A_min, schedule_max(sc.Q_f, T),
                             bulk_velocity_norm(sc, g.A_min, T), log_space(dz_min, dz_max, points), sc.diffusion,
                             c.safety);
  auto os = open_out(c.out, "cfl_curve.csv");
  write_cfl_curve(os, pts);
  info("wrote " + std::to_string(pts.size()) + " points");
  return 0;
}

int run_compare_xp(const Common& c, double cadence_h) {
  Scenario sc = prepare(c);
  std::fill(sc.diffusion.begin(), sc.diffusion.end(), 0.0);
  SimulationOptions opt;
  opt.safety = c.safety;
  if (cadence_h >= 0.0) opt.cadence = cadence_h * kHour;
  const Constitutive law(sc.constitutive);
  MemorySink cs, xp;
  const auto rep_cs = simulate(sc, sc.run.N, opt, &cs, &law);
  const auto rep_xp = simulate_xp(sc, sc.run.N, opt, &xp, &law);
  const double dz = (sc.H + sc.B) / sc.run.N;

  auto cs_prof = open_out(c.out, "cs_profiles.csv");
  auto cs_out = open_out(c.out, "cs_outputs.csv");
  auto xp_prof = open_out(c.out, "xp_profiles.csv");
  auto xp_out = open_out(c.out, "xp_outputs.csv");
  CsvSink cs_sink(cs_prof, cs_out, law.rho_L(), law.density_ratio());
  CsvSink xp_sink(xp_prof, xp_out, law.rho_L(), law.density_ratio());
  const Grid g = build_grid(sc, sc.run.N);
  auto dist = open_out(c.out, "distance.csv");
  dist << "t,N,distance\n";
  for (std::size_t i = 0; i < cs.times.size(); ++i) {
    const double t = cs.times[i];
    cs_sink.on_snapshot(Snapshot{t, "CS", &g, &cs.states[i], sc.Q_f.at(t), sc.Q_u.at(t)});
    xp_sink.on_snapshot(Snapshot{t, "XP", &g, &xp.states[i], sc.Q_f.at(t), sc.Q_u.at(t)});
    const double d = e_n_rel(xp.states[i], cs.states[i], dz);
    dist << format_double(t) << ',' << sc.run.N << ',' << format_double(d) << '\n';
    info("t = " + format_double(t / kHour) + " h, CS-XP distance " + format_double(d));
  }
  if (rep_cs.omega_violations > 0 || rep_xp.omega_violations > 0) {
    std::cerr << "error: invariant-region violations (CS " << rep_cs.omega_violations << ", XP "
              << rep_xp.omega_violations << ")\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reactive settling in clarifier-thickeners"};
  app.require_subcommand(1);

  Common sim_c, conv_c, cfl_c, cmp_c;
  std::string method = "cs";
  double cadence_h = -1.0;
  bool debug_invariants = false;
  auto* sim = app.add_subcommand("simulate", "run one simulation and write profiles.csv, outputs.csv, report.json");
  add_common(sim, sim_c);
  sim->add_option("--method", method, "numerical method")->check(CLI::IsMember({"cs", "xp"}))->capture_default_str();
  sim->add_option("--cadence", cadence_h, "snapshot interval in hours (default: scenario value)")
      ->check(CLI::NonNegativeNumber);
  sim->add_flag("--debug-invariants", debug_invariants, "abort on the first invariant-region violation");

  std::vector<int> levels{16, 32, 64, 128, 256};
  int reference = 1024;
  std::vector<double> times_h{3, 6, 9};
  std::string conv_method = "cs";
  auto* conv = app.add_subcommand("converge", "errors and convergence orders against a fine reference (errors.csv)");
  add_common(conv, conv_c);
  conv->add_option("--levels", levels, "coarse N values")->delimiter(',')->capture_default_str();
  conv->add_option("--reference", reference, "reference N (multiple of every level)")->capture_default_str();
  conv->add_option("--times", times_h, "evaluation times in hours")->delimiter(',')->capture_default_str();
  conv->add_option("--method", conv_method, "method of the coarse runs")
      ->check(CLI::IsMember({"cs", "xp"}))
      ->capture_default_str();

  double dz_min = 1e-3, dz_max = 1e-1;
  int points = 41;
  auto* cfl = app.add_subcommand("cfl-curve", "maximal time step of both methods versus layer depth (cfl_curve.csv)");
  add_common(cfl, cfl_c);
  cfl->add_option("--dz-min", dz_min, "smallest layer depth in m")->capture_default_str();
  cfl->add_option("--dz-max", dz_max, "largest layer depth in m")->capture_default_str();
  cfl->add_option("--points", points, "number of log-spaced samples")->check(CLI::Range(2, 100000))->capture_default_str();

  double cmp_cadence_h = -1.0;
  auto* cmp = app.add_subcommand("compare-xp", "run both methods and write paired profiles and distances");
  add_common(cmp, cmp_c);
  cmp->add_option("--cadence", cmp_cadence_h, "snapshot interval in hours")->check(CLI::NonNegativeNumber);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*sim) return run_simulate(sim_c, method, cadence_h, debug_invariants);
    if (*conv) return run_converge(conv_c, levels, reference, times_h, conv_method);
    if (*cfl) {
      cfl_c.safety = cfl->count("--safety") ? cfl_c.safety : 1.0;
      return run_cfl_curve(cfl_c, dz_min, dz_max, points);
    }
    if (*cmp) return run_compare_xp(cmp_c, cmp_cadence_h);
  } catch (const InvariantViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
