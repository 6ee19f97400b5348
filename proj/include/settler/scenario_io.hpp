#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "settler/scenario.hpp"
#include "settler/stepper.hpp"

namespace settler {

/// Scenario-file problem, prefixed with the JSON path of the offending field.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(const std::string& path, const std::string& msg) : std::runtime_error(path + ": " + msg) {}
};

namespace io {

using nlohmann::json;

struct Units {
  double time = 1.0;  // seconds per file time unit
  double flow = 1.0;  // m^3/s per file flow unit
};

inline const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ScenarioError(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw ScenarioError(path + "." + key, "missing");
  return *it;
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ScenarioError(path, "expected a number");
  return j.get<double>();
}

inline double number(const json& j, const std::string& key, const std::string& path) {
  return number(require(j, key, path), path + "." + key);
}

inline double number_or(const json& j, const std::string& key, double fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  return number(j.at(key), path + "." + key);
}

inline std::string text(const json& j, const std::string& key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_string()) throw ScenarioError(path + "." + key, "expected a string");
  return v.get<std::string>();
}

inline std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) throw ScenarioError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline Units read_units(const json& root) {
  Units u;
  if (!root.contains("units")) return u;
  const json& j = root.at("units");
  const std::string tu = j.value("time", "s");
  const std::string fu = j.value("flow", "m3/s");
  if (tu == "h") {
    u.time = kHour;
  } else if (tu != "s") {
    throw ScenarioError("$.units.time", "expected \"s\" or \"h\"");
  }
  if (fu == "m3/h") {
    u.flow = kCubicMetresPerHour;
  } else if (fu != "m3/s") {
    throw ScenarioError("$.units.flow", "expected \"m3/s\" or \"m3/h\"");
  }
  return u;
}

template <class Schedule>
Schedule read_schedule(const json& j, const std::string& path, double time_scale, double value_scale) {
  auto times = numbers(require(j, "t", path), path + ".t");
  for (auto& t : times) t *= time_scale;
  const json& vals = require(j, "values", path);
  if (!vals.is_array()) throw ScenarioError(path + ".values", "expected an array");
  std::vector<typename std::decay_t<decltype(std::declval<Schedule>().values())>::value_type> values;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const std::string p = path + ".values[" + std::to_string(i) + "]";
    if constexpr (std::is_same_v<Schedule, ScalarSchedule>) {
      values.push_back(number(vals[i], p) * value_scale);
    } else {
      auto v = numbers(vals[i], p);
      for (auto& x : v) x *= value_scale;
      values.push_back(std::move(v));
    }
  }
  try {
    return Schedule(std::move(times), std::move(values));
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(path, e.what());
  }
}

inline AreaSegment read_segment(const json& j, const std::string& path) {
  const std::string kind = text(j, "kind", path);
  const double zt = number(j, "z_top", path);
  const double zb = number(j, "z_bottom", path);
  if (kind == "cylinder") return AreaSegment::cylinder(zt, zb, number(j, "area", path));
  if (kind == "cone") return AreaSegment::cone(zt, zb, number(j, "area_top", path), number(j, "area_bottom", path));
  if (kind == "step") {
    return AreaSegment::step(zt, zb, number(j, "z_step", path), number(j, "area_top", path),
                             number(j, "area_bottom", path));
  }
  throw ScenarioError(path + ".kind", "expected cylinder, cone or step");
}

inline DepthProfile read_profile(const json& j, const std::string& path) {
  if (j.is_object() && j.contains("constant")) {
    const double v = number(j.at("constant"), path + ".constant");
    return DepthProfile({{-1e300, 1e300, v, 0.0}});
  }
  if (!j.is_array()) throw ScenarioError(path, "expected {\"constant\": v} or an array of pieces");
  std::vector<DepthProfile::Piece> pieces;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    pieces.push_back({number(j[i], "z0", p), number(j[i], "z1", p), number_or(j[i], "a", 0.0, p),
                      number_or(j[i], "b", 0.0, p)});
  }
  return DepthProfile(std::move(pieces));
}

inline json write_profile(const DepthProfile& p) {
  json arr = json::array();
  for (const auto& piece : p.pieces()) {
    arr.push_back({{"z0", piece.z0}, {"z1", piece.z1}, {"a", piece.a}, {"b", piece.b}});
  }
  return arr;
}

template <class Schedule>
json write_schedule(const Schedule& s) {
  return {{"t", s.times()}, {"values", s.values()}};
}

}  // namespace io

/// Parses a scenario document. Times and flows are converted to SI using the
/// optional "units" block ("time": "s"|"h", "flow": "m3/s"|"m3/h").
inline Scenario scenario_from_json(const nlohmann::json& root) {
  using namespace io;
  if (!root.is_object()) throw ScenarioError("$", "expected an object");
  const Units u = read_units(root);
  Scenario sc;
  sc.name = root.value("name", "scenario");

  const json& geo = require(root, "geometry", "$");
  sc.H = number(geo, "H", "$.geometry");
  sc.B = number(geo, "B", "$.geometry");
  const std::string mode = geo.value("face_area", "average");
  if (mode == "average") {
    sc.face_mode = FaceAreaMode::average;
  } else if (mode == "point") {
    sc.face_mode = FaceAreaMode::point;
  } else {
    throw ScenarioError("$.geometry.face_area", "expected average or point");
  }
  if (geo.contains("profile")) {
    if (geo.at("profile") != "v7like") throw ScenarioError("$.geometry.profile", "unknown builtin profile");
    sc.area = AreaProfile::v7like();
  } else {
    const json& segs = require(geo, "segments", "$.geometry");
    if (!segs.is_array()) throw ScenarioError("$.geometry.segments", "expected an array");
    std::vector<AreaSegment> v;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      v.push_back(read_segment(segs[i], "$.geometry.segments[" + std::to_string(i) + "]"));
    }
    sc.area = AreaProfile(std::move(v));
  }

  const json& sch = require(root, "schedules", "$");
  sc.Q_f = read_schedule<ScalarSchedule>(require(sch, "Q_f", "$.schedules"), "$.schedules.Q_f", u.time, u.flow);
  sc.Q_u = read_schedule<ScalarSchedule>(require(sch, "Q_u", "$.schedules"), "$.schedules.Q_u", u.time, u.flow);
  sc.C_f = read_schedule<VectorSchedule>(require(sch, "C_f", "$.schedules"), "$.schedules.C_f", u.time, 1.0);
  sc.S_f = read_schedule<VectorSchedule>(require(sch, "S_f", "$.schedules"), "$.schedules.S_f", u.time, 1.0);

  const json& init = require(root, "initial", "$");
  for (const char* key : {"C", "S"}) {
    const json& arr = require(init, key, "$.initial");
    const std::string p = std::string("$.initial.") + key;
    if (!arr.is_array()) throw ScenarioError(p, "expected one profile per component");
    auto& dst = key[0] == 'C' ? sc.C0 : sc.S0;
    for (std::size_t i = 0; i < arr.size(); ++i) dst.push_back(read_profile(arr[i], p + "[" + std::to_string(i) + "]"));
  }
  for (auto* profiles : {&sc.C0, &sc.S0}) {
    for (auto& p : *profiles) {
      // a "constant" profile spans the vessel exactly
      if (p.pieces().size() == 1 && p.pieces().front().z0 == -1e300) {
        p = DepthProfile::constant(-sc.H, sc.B, p.pieces().front().a);
      }
    }
  }

  if (root.contains("constitutive")) {
    const json& c = root.at("constitutive");
    const std::string p = "$.constitutive";
    auto& k = sc.constitutive;
    k.v0 = number_or(c, "v0", k.v0, p);
    k.X_bar = number_or(c, "X_bar", k.X_bar, p);
    k.eta = number_or(c, "eta", k.eta, p);
    k.X_c = number_or(c, "X_c", k.X_c, p);
    k.alpha = number_or(c, "alpha", k.alpha, p);
    k.rho_X = number_or(c, "rho_X", k.rho_X, p);
    k.rho_L = number_or(c, "rho_L", k.rho_L, p);
    k.g = number_or(c, "g", k.g, p);
    k.X_max = number_or(c, "X_max", k.X_max, p);
  }

  if (root.contains("reactions")) {
    const json& r = root.at("reactions");
    const std::string p = "$.reactions";
    const std::string model = r.value("model", "denitrification");
    if (model == "none") {
      sc.reactions.kind = ReactionConfig::Kind::none;
    } else if (model == "denitrification") {
      sc.reactions.kind = ReactionConfig::Kind::denitrification;
    } else {
      throw ScenarioError(p + ".model", "expected denitrification or none");
    }
    auto& d = sc.reactions.denitrification;
    d.Y = number_or(r, "Y", d.Y, p);
    d.b = number_or(r, "b", d.b, p);
    d.f_P = number_or(r, "f_P", d.f_P, p);
    d.mu_max = number_or(r, "mu_max", d.mu_max, p);
    d.K_NO3 = number_or(r, "K_NO3", d.K_NO3, p);
    d.K_S = number_or(r, "K_S", d.K_S, p);
    d.X_Z_fraction = number_or(r, "X_Z_fraction", d.X_Z_fraction, p);
    const std::string zm = r.value("z_mode", "identity");
    if (zm == "identity") {
      d.z_mode = ZMode::identity;
    } else if (zm == "ramp") {
      d.z_mode = ZMode::ramp;
    } else {
      throw ScenarioError(p + ".z_mode", "expected identity or ramp");
    }
  }

  sc.diffusion = root.contains("diffusion") ? numbers(root.at("diffusion"), "$.diffusion")
                                            : std::vector<double>(sc.S0.size(), 0.0);

  if (root.contains("run")) {
    const json& r = root.at("run");
    const json& n = require(r, "N", "$.run");
    if (!n.is_number_integer()) throw ScenarioError("$.run.N", "expected an integer");
    sc.run.N = n.get<int>();
    sc.run.T = number(r, "T", "$.run") * u.time;
    sc.run.cadence = number_or(r, "cadence", 0.0, "$.run") * u.time;
  }

  try {
    validate_scenario(sc);
  } catch (const std::invalid_argument& e) {
    throw ScenarioError("$", e.what());
  }
  return sc;
}

/// SI-unit document that scenario_from_json reads back to an equal Scenario.
inline nlohmann::json scenario_to_json(const Scenario& sc) {
  using nlohmann::json;
  json segs = json::array();
  for (const auto& s : sc.area.segments()) {
    switch (s.kind) {
      case AreaSegment::Kind::cylinder:
        segs.push_back({{"kind", "cylinder"}, {"z_top", s.z_top}, {"z_bottom", s.z_bottom}, {"area", s.area_top}});
        break;
      case AreaSegment::Kind::cone:
        segs.push_back({{"kind", "cone"}, {"z_top", s.z_top}, {"z_bottom", s.z_bottom},
                        {"area_top", s.area_top}, {"area_bottom", s.area_bottom}});
        break;
      case AreaSegment::Kind::step:
        segs.push_back({{"kind", "step"}, {"z_top", s.z_top}, {"z_bottom", s.z_bottom}, {"z_step", s.z_step},
                        {"area_top", s.area_top}, {"area_bottom", s.area_bottom}});
        break;
    }
  }
  json C = json::array();
  for (const auto& p : sc.C0) C.push_back(io::write_profile(p));
  json S = json::array();
  for (const auto& p : sc.S0) S.push_back(io::write_profile(p));
  const auto& k = sc.constitutive;
  const auto& d = sc.reactions.denitrification;
  return {
      {"name", sc.name},
      {"units", {{"time", "s"}, {"flow", "m3/s"}}},
      {"geometry",
       {{"H", sc.H},
        {"B", sc.B},
        {"face_area", sc.face_mode == FaceAreaMode::average ? "average" : "point"},
        {"segments", segs}}},
      {"schedules",
       {{"Q_f", io::write_schedule(sc.Q_f)},
        {"Q_u", io::write_schedule(sc.Q_u)},
        {"C_f", io::write_schedule(sc.C_f)},
        {"S_f", io::write_schedule(sc.S_f)}}},
      {"initial", {{"C", C}, {"S", S}}},
      {"constitutive",
       {{"v0", k.v0}, {"X_bar", k.X_bar}, {"eta", k.eta}, {"X_c", k.X_c}, {"alpha", k.alpha},
        {"rho_X", k.rho_X}, {"rho_L", k.rho_L}, {"g", k.g}, {"X_max", k.X_max}}},
      {"reactions",
       {{"model", sc.reactions.kind == ReactionConfig::Kind::none ? "none" : "denitrification"},
        {"Y", d.Y}, {"b", d.b}, {"f_P", d.f_P}, {"mu_max", d.mu_max}, {"K_NO3", d.K_NO3}, {"K_S", d.K_S},
        {"z_mode", d.z_mode == ZMode::ramp ? "ramp" : "identity"}, {"X_Z_fraction", d.X_Z_fraction}}},
      {"diffusion", sc.diffusion},
      {"run", {{"N", sc.run.N}, {"T", sc.run.T}, {"cadence", sc.run.cadence}}},
  };
}

/// Builtin name ("example1".."example5") or path to a JSON scenario file.
inline Scenario load_scenario(const std::string& name_or_path) {
  if (is_builtin_scenario(name_or_path)) {
    return builtin_scenario(name_or_path);
  }
  std::ifstream in(name_or_path);
  if (!in) {
    throw ScenarioError(name_or_path, "cannot open scenario file");
  }
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError(name_or_path, e.what());
  }
  return scenario_from_json(root);
}

inline nlohmann::json report_to_json(const RunReport& r) {
  const auto& a = r.audit;
  return {
      {"method", r.method},
      {"scenario", r.scenario},
      {"N", r.N},
      {"horizon_s", r.horizon},
      {"final_time_s", r.final_time},
      {"steps", r.steps},
      {"dt_max_s", r.dt_max},
      {"wall_seconds", r.wall_seconds},
      {"omega_violations", r.omega_violations},
      {"clamp_events", r.clamp_events},
      {"first_violation", r.first_violation},
      {"mass_audit",
       {{"initial", a.initial}, {"final", a.final}, {"feed", a.feed}, {"top", a.top}, {"bottom", a.bottom},
        {"reaction", a.reaction}, {"throughput", a.throughput}, {"residual", a.residual},
        {"relative", a.relative}, {"max_relative", a.max_relative}}},
  };
}

}  // namespace settler
