#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "settler/csv.hpp"
#include "settler/scenario_io.hpp"

using namespace settler;
using nlohmann::json;

namespace {

std::string error_of(const json& doc) {
  try {
    scenario_from_json(doc);
  } catch (const ScenarioError& e) {
    return e.what();
  }
  return {};
}

json minimal() {
  return json::parse(R"({
    "units": {"time": "h", "flow": "m3/h"},
    "geometry": {"H": 1, "B": 3, "segments": [{"kind": "cylinder", "z_top": -1, "z_bottom": 3, "area": 400}]},
    "schedules": {
      "Q_f": {"t": [0], "values": [100]},
      "Q_u": {"t": [0], "values": [30]},
      "C_f": {"t": [0], "values": [[2.0, 1.0]]},
      "S_f": {"t": [0], "values": [[0.006, 0.0009, 0.0]]}
    },
    "initial": {"C": [{"constant": 1.0}, {"constant": 0.5}], "S": [{"constant": 0}, {"constant": 0}, {"constant": 0}]},
    "run": {"N": 20, "T": 2, "cadence": 0.5}
  })");
}

}  // namespace

TEST(ScenarioJson, RoundTripsBuiltins) {
  for (const auto& name : builtin_scenario_names()) {
    Scenario sc = builtin_scenario(name);
    const Scenario back = scenario_from_json(scenario_to_json(sc));
    EXPECT_EQ(back, sc) << name;
    const Scenario again = scenario_from_json(json::parse(scenario_to_json(sc).dump()));
    EXPECT_EQ(again, sc) << name;
  }
}

TEST(ScenarioJson, UnitsConvertToSi) {
  const Scenario sc = scenario_from_json(minimal());
  EXPECT_NEAR(sc.Q_f.at(0.0), 100.0 / 3600.0, 1e-15);
  EXPECT_EQ(sc.run.T, 7200.0);
  EXPECT_EQ(sc.run.cadence, 1800.0);
  EXPECT_EQ(sc.run.N, 20);
  EXPECT_EQ(sc.diffusion, std::vector<double>(3, 0.0));
  EXPECT_EQ(sc.reactions.kind, ReactionConfig::Kind::denitrification);
  const State s = initial_state(sc, build_grid(sc, 8));
  EXPECT_DOUBLE_EQ(s.X(4), 1.5);
}

TEST(ScenarioJson, ErrorsNameTheField) {
  json d = minimal();
  d["geometry"].erase("H");
  EXPECT_NE(error_of(d).find("$.geometry.H"), std::string::npos) << error_of(d);

  d = minimal();
  d["reactions"] = {{"z_mode", "sometimes"}};
  EXPECT_NE(error_of(d).find("$.reactions.z_mode"), std::string::npos);

  d = minimal();
  d["schedules"]["Q_f"]["t"] = {0, 2, 1};
  d["schedules"]["Q_f"]["values"] = {1, 2, 3};
  EXPECT_NE(error_of(d).find("$.schedules.Q_f"), std::string::npos);

  d = minimal();
  d["schedules"]["C_f"]["values"][0][1] = "lots";
  EXPECT_NE(error_of(d).find("$.schedules.C_f.values[0]"), std::string::npos) << error_of(d);

  d = minimal();
  d["units"]["flow"] = "gpm";
  EXPECT_NE(error_of(d).find("$.units.flow"), std::string::npos);

  d = minimal();
  d["run"]["N"] = 2.5;
  EXPECT_NE(error_of(d).find("$.run.N"), std::string::npos);

  d = minimal();
  d["geometry"]["segments"][0]["kind"] = "sphere";
  EXPECT_NE(error_of(d).find("$.geometry.segments[0].kind"), std::string::npos);

  d = minimal();
  d["schedules"]["Q_u"]["values"] = {300};
  EXPECT_NE(error_of(d).find("Q_f >= Q_u"), std::string::npos);
}

TEST(ScenarioJson, LoadsFilesAndBuiltins) {
  EXPECT_EQ(load_scenario("example3").name, "example3");
  EXPECT_THROW(load_scenario("/nonexistent/scenario.json"), ScenarioError);
  const Scenario file = load_scenario(std::string(SETTLER_SOURCE_DIR) + "/scenarios/example1.json");
  const Scenario builtin = example1();
  EXPECT_EQ(file.H, builtin.H);
  EXPECT_EQ(file.Q_f, builtin.Q_f);
  EXPECT_EQ(file.Q_u, builtin.Q_u);
  EXPECT_EQ(file.run, builtin.run);
  const State a = initial_state(file, build_grid(file, 32));
  const State b = initial_state(builtin, build_grid(builtin, 32));
  for (std::size_t i = 0; i < a.values().size(); ++i) EXPECT_NEAR(a.values()[i], b.values()[i], 1e-12);
  for (double t : {0.0, 3.0 * kHour, 8.0 * kHour}) {
    for (std::size_t k = 0; k < 2; ++k) EXPECT_NEAR(file.C_f.at(t)[k], builtin.C_f.at(t)[k], 1e-12);
  }
}

TEST(ScenarioJson, AllShippedScenarioFilesLoad) {
  namespace fs = std::filesystem;
  int n = 0;
  for (const auto& e : fs::directory_iterator(fs::path(SETTLER_SOURCE_DIR) / "scenarios")) {
    if (e.path().extension() != ".json") continue;
    EXPECT_NO_THROW(load_scenario(e.path().string())) << e.path();
    ++n;
  }
  EXPECT_GE(n, 1);
}

TEST(Csv, DoublesRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 6.79153475e-5, -2.5e300, 0.0}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Csv, Headers) {
  EXPECT_EQ(profiles_header(2, 3), "t,j,z,C1,C2,S1,S2,S3,X,W");
  EXPECT_EQ(outputs_header(1, 1), "t,C_e1,C_u1,S_e1,S_u1,Q_e");
}

TEST(Csv, OutputIsDeterministic) {
  auto run = [] {
    std::ostringstream prof, out;
    const Constitutive law;
    CsvSink sink(prof, out, law.rho_L(), law.density_ratio());
    SimulationOptions opt;
    opt.horizon = 900.0;
    opt.cadence = 300.0;
    simulate(example1(), 12, opt, &sink, &law);
    return prof.str() + "--\n" + out.str();
  };
  const std::string a = run();
  EXPECT_EQ(a, run());
  // four snapshots of 14 cells plus a header
  const auto prof = a.substr(0, a.find("--\n"));
  EXPECT_EQ(std::count(prof.begin(), prof.end(), '\n'), 1 + 4 * 14);
}

TEST(Csv, ErrorTableLayout) {
  ConvergenceStudy s;
  s.rows.push_back({3600.0, 16, 0.5, std::nullopt, 0.25});
  s.rows.push_back({3600.0, 32, 0.25, 1.0, 0.5});
  std::ostringstream os;
  write_error_table(os, s);
  EXPECT_EQ(os.str(), "t,N,e_rel,theta,cpu_s\n3600,16,0.5,,0.25\n3600,32,0.25,1,0.5\n");
}

TEST(Report, JsonFields) {
  RunReport r;
  r.method = "CS";
  r.N = 8;
  r.audit.max_relative = 1e-15;
  const json j = report_to_json(r);
  EXPECT_EQ(j.at("method"), "CS");
  EXPECT_EQ(j.at("N"), 8);
  EXPECT_EQ(j.at("mass_audit").at("max_relative"), 1e-15);
}
