#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace settler {

/// Flat cell-major layout: cell j occupies [j*stride, (j+1)*stride), holding
/// the k_C solid concentrations followed by the k_S soluble concentrations.
struct Layout {
  std::size_t cells = 0;
  std::size_t k_C = 0;
  std::size_t k_S = 0;

  std::size_t stride() const { return k_C + k_S; }
  std::size_t size() const { return cells * stride(); }
  std::size_t solid(std::size_t j, std::size_t k) const { return j * stride() + k; }
  std::size_t soluble(std::size_t j, std::size_t k) const { return j * stride() + k_C + k; }

  bool operator==(const Layout&) const = default;
};

class State {
 public:
  State() = default;
  explicit State(Layout layout) : layout_(layout), values_(layout.size(), 0.0) {}
  State(Layout layout, std::vector<double> values) : layout_(layout), values_(std::move(values)) {
    if (values_.size() != layout_.size()) {
      throw std::invalid_argument("State: value count does not match layout");
    }
  }

  const Layout& layout() const { return layout_; }
  std::size_t cells() const { return layout_.cells; }
  std::size_t k_C() const { return layout_.k_C; }
  std::size_t k_S() const { return layout_.k_S; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  std::span<double> solids(std::size_t j) { return {values_.data() + j * layout_.stride(), layout_.k_C}; }
  std::span<const double> solids(std::size_t j) const {
    return {values_.data() + j * layout_.stride(), layout_.k_C};
  }
  std::span<double> solubles(std::size_t j) {
    return {values_.data() + j * layout_.stride() + layout_.k_C, layout_.k_S};
  }
  std::span<const double> solubles(std::size_t j) const {
    return {values_.data() + j * layout_.stride() + layout_.k_C, layout_.k_S};
  }

  double& C(std::size_t j, std::size_t k) { return values_[layout_.solid(j, k)]; }
  double C(std::size_t j, std::size_t k) const { return values_[layout_.solid(j, k)]; }
  double& S(std::size_t j, std::size_t k) { return values_[layout_.soluble(j, k)]; }
  double S(std::size_t j, std::size_t k) const { return values_[layout_.soluble(j, k)]; }

  /// X_j = sum_k C_j^(k)
  double X(std::size_t j) const {
    double x = 0.0;
    for (double c : solids(j)) x += c;
    return x;
  }

  bool operator==(const State&) const = default;

 private:
  Layout layout_;
  std::vector<double> values_;
};

/// W_j = rho_L - r X_j - sum_k S_j^(k); no sign is enforced.
inline std::vector<double> water_profile(const State& s, double rho_L, double r) {
  std::vector<double> w(s.cells());
  for (std::size_t j = 0; j < s.cells(); ++j) {
    double sum_s = 0.0;
    for (double v : s.solubles(j)) sum_s += v;
    w[j] = rho_L - r * s.X(j) - sum_s;
  }
  return w;
}

struct OmegaViolation {
  std::size_t cell = 0;
  std::string what;
  double value = 0.0;
};

class InvariantViolation : public std::runtime_error {
 public:
  explicit InvariantViolation(const OmegaViolation& v)
      : std::runtime_error("state left the admissible set at cell " + std::to_string(v.cell) + ": " +
                           v.what + " = " + std::to_string(v.value)),
        violation_(v) {}
  const OmegaViolation& violation() const { return violation_; }

 private:
  OmegaViolation violation_;
};

/// First cell where 0 <= C, X <= X_max or 0 <= S fails by more than `slack`.
inline std::optional<OmegaViolation> find_omega_violation(const State& s, double X_max,
                                                          double slack = 1e-12) {
  for (std::size_t j = 0; j < s.cells(); ++j) {
    for (std::size_t k = 0; k < s.k_C(); ++k) {
      if (!(s.C(j, k) >= -slack)) {
        return OmegaViolation{j, "C[" + std::to_string(k) + "]", s.C(j, k)};
      }
    }
    const double x = s.X(j);
    if (!(x <= X_max + slack)) {
      return OmegaViolation{j, "X", x};
    }
    for (std::size_t k = 0; k < s.k_S(); ++k) {
      if (!(s.S(j, k) >= -slack)) {
        return OmegaViolation{j, "S[" + std::to_string(k) + "]", s.S(j, k)};
      }
    }
  }
  return std::nullopt;
}

inline std::size_t count_omega_violations(const State& s, double X_max, double slack = 1e-12) {
  std::size_t n = 0;
  for (std::size_t j = 0; j < s.cells(); ++j) {
    bool bad = !(s.X(j) <= X_max + slack);
    for (double c : s.solids(j)) bad = bad || !(c >= -slack);
    for (double v : s.solubles(j)) bad = bad || !(v >= -slack);
    n += bad ? 1 : 0;
  }
  return n;
}

/// Sets negative entries to 0 and rescales C where X > X_max. Returns the
/// number of entries changed.
inline std::size_t clamp_to_omega(std::span<double> values, const Layout& layout, double X_max) {
  std::size_t changed = 0;
  for (std::size_t j = 0; j < layout.cells; ++j) {
    double x = 0.0;
    for (std::size_t k = 0; k < layout.stride(); ++k) {
      double& v = values[j * layout.stride() + k];
      if (v < 0.0) {
        v = 0.0;
        ++changed;
      }
      if (k < layout.k_C) x += v;
    }
    if (x > X_max) {
      for (std::size_t k = 0; k < layout.k_C; ++k) {
        values[layout.solid(j, k)] *= X_max / x;
      }
      ++changed;
    }
  }
  return changed;
}

enum class OmegaPolicy {
  count,   // record violations, leave the state untouched
  clamp,   // project back into the admissible set and record
  strict,  // throw InvariantViolation
};

}  // namespace settler
