#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "settler/harness.hpp"
#include "settler/state.hpp"
#include "settler/stepper.hpp"

namespace settler {

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc()) {
    throw std::runtime_error("format_double: conversion failed");
  }
  return std::string(buf, res.ptr);
}

inline std::string profiles_header(std::size_t k_C, std::size_t k_S) {
  std::string h = "t,j,z";
  for (std::size_t k = 0; k < k_C; ++k) h += ",C" + std::to_string(k + 1);
  for (std::size_t k = 0; k < k_S; ++k) h += ",S" + std::to_string(k + 1);
  return h + ",X,W";
}

inline std::string outputs_header(std::size_t k_C, std::size_t k_S) {
  std::string h = "t";
  for (const char* side : {"C_e", "C_u"}) {
    for (std::size_t k = 0; k < k_C; ++k) h += std::string(",") + side + std::to_string(k + 1);
  }
  for (const char* side : {"S_e", "S_u"}) {
    for (std::size_t k = 0; k < k_S; ++k) h += std::string(",") + side + std::to_string(k + 1);
  }
  return h + ",Q_e";
}

/// Streams profiles.csv rows (every cell, every snapshot) and outputs.csv rows
/// (effluent and underflow concentrations plus Q_e).
class CsvSink final : public OutputSink {
 public:
  CsvSink(std::ostream& profiles, std::ostream& outputs, double rho_L, double r)
      : profiles_(profiles), outputs_(outputs), rho_L_(rho_L), r_(r) {}

  void on_snapshot(const Snapshot& s) override {
    const State& st = *s.state;
    const Grid& g = *s.grid;
    if (!header_written_) {
      profiles_ << profiles_header(st.k_C(), st.k_S()) << '\n';
      outputs_ << outputs_header(st.k_C(), st.k_S()) << '\n';
      header_written_ = true;
    }
    const auto W = water_profile(st, rho_L_, r_);
    const std::string t = format_double(s.t);
    for (std::size_t j = 0; j < st.cells(); ++j) {
      profiles_ << t << ',' << j << ',' << format_double(g.z_cell[j]);
      for (double v : st.solids(j)) profiles_ << ',' << format_double(v);
      for (double v : st.solubles(j)) profiles_ << ',' << format_double(v);
      profiles_ << ',' << format_double(st.X(j)) << ',' << format_double(W[j]) << '\n';
    }
    const std::size_t last = st.cells() - 1;
    outputs_ << t;
    for (double v : st.solids(0)) outputs_ << ',' << format_double(v);
    for (double v : st.solids(last)) outputs_ << ',' << format_double(v);
    for (double v : st.solubles(0)) outputs_ << ',' << format_double(v);
    for (double v : st.solubles(last)) outputs_ << ',' << format_double(v);
    outputs_ << ',' << format_double(effluent_flow(s.Q_f, s.Q_u)) << '\n';
  }

 private:
  std::ostream& profiles_;
  std::ostream& outputs_;
  double rho_L_;
  double r_;
  bool header_written_ = false;
};

/// Error table in the layout t,N,e_rel,theta,cpu_s (theta empty for the first N).
inline void write_error_table(std::ostream& os, const ConvergenceStudy& study) {
  os << "t,N,e_rel,theta,cpu_s\n";
  for (const auto& r : study.rows) {
    os << format_double(r.t) << ',' << r.N << ',' << format_double(r.e) << ','
       << (r.theta ? format_double(*r.theta) : std::string()) << ',' << format_double(r.cpu_seconds) << '\n';
  }
}

inline void write_cfl_curve(std::ostream& os, const std::vector<CflCurvePoint>& pts) {
  os << "dz,dt_cs,dt_xp\n";
  for (const auto& p : pts) {
    os << format_double(p.dz) << ',' << format_double(p.dt_cs) << ',' << format_double(p.dt_xp) << '\n';
  }
}

}  // namespace settler
