#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace settler {

/// Piecewise-constant function of time: value v[i] on [t[i], t[i+1]), the
/// last value extended to infinity. Value is a scalar or a std::vector<double>.
template <class Value>
class Schedule {
 public:
  Schedule() = default;
  Schedule(std::vector<double> times, std::vector<Value> values)
      : times_(std::move(times)), values_(std::move(values)) {
    validate();
  }
  static Schedule constant(Value v) { return Schedule({0.0}, {std::move(v)}); }

  const std::vector<double>& times() const { return times_; }
  const std::vector<Value>& values() const { return values_; }
  bool empty() const { return values_.empty(); }

  const Value& at(double t) const {
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const auto idx = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
    return values_[idx];
  }

  /// Exact mean over [t0, t0 + dt], weighting each piece by its overlap.
  Value average(double t0, double dt) const {
    if (!(dt > 0.0)) {
      return at(t0);
    }
    const double t1 = t0 + dt;
    Value acc = zero_like(values_.front());
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const double lo = std::max(t0, i == 0 ? t0 : times_[i]);
      const double hi = std::min(t1, i + 1 < times_.size() ? times_[i + 1] : t1);
      if (hi > lo) {
        axpy(acc, (hi - lo) / dt, values_[i]);
      }
    }
    return acc;
  }

  /// Breakpoints strictly inside (0, horizon).
  std::vector<double> breakpoints(double horizon) const {
    std::vector<double> out;
    for (double t : times_) {
      if (t > 0.0 && t < horizon) {
        out.push_back(t);
      }
    }
    return out;
  }

  bool operator==(const Schedule&) const = default;

 private:
  void validate() const {
    if (times_.empty() || times_.size() != values_.size()) {
      throw std::invalid_argument("schedule: need equally many breakpoints and values (at least one)");
    }
    if (times_.front() != 0.0) {
      throw std::invalid_argument("schedule: first breakpoint must be t = 0");
    }
    for (std::size_t i = 1; i < times_.size(); ++i) {
      if (!(times_[i] > times_[i - 1])) {
        throw std::invalid_argument("schedule: breakpoints must increase strictly");
      }
    }
    if constexpr (!std::is_arithmetic_v<Value>) {
      for (const auto& v : values_) {
        if (v.size() != values_.front().size()) {
          throw std::invalid_argument("schedule: vector values differ in length");
        }
      }
    }
  }

  static Value zero_like(const Value& v) {
    if constexpr (std::is_arithmetic_v<Value>) {
      return Value{0};
    } else {
      return Value(v.size(), 0.0);
    }
  }

  static void axpy(Value& acc, double w, const Value& v) {
    if constexpr (std::is_arithmetic_v<Value>) {
      acc += w * v;
    } else {
      for (std::size_t k = 0; k < acc.size(); ++k) {
        acc[k] += w * v[k];
      }
    }
  }

  std::vector<double> times_;
  std::vector<Value> values_;
};

using ScalarSchedule = Schedule<double>;
using VectorSchedule = Schedule<std::vector<double>>;

/// Piecewise-linear profile in depth: value a + b z on [z0, z1). Outside the
/// covered range the boundary value is extended.
class DepthProfile {
 public:
  struct Piece {
    double z0 = 0.0;
    double z1 = 0.0;
    double a = 0.0;
    double b = 0.0;
    bool operator==(const Piece&) const = default;
  };

  DepthProfile() = default;
  explicit DepthProfile(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
    std::sort(pieces_.begin(), pieces_.end(), [](const Piece& x, const Piece& y) { return x.z0 < y.z0; });
  }
  static DepthProfile constant(double z0, double z1, double value) {
    return DepthProfile({{z0, z1, value, 0.0}});
  }

  const std::vector<Piece>& pieces() const { return pieces_; }

  void validate(double top, double bottom) const {
    if (pieces_.empty()) {
      throw std::invalid_argument("depth profile: no pieces");
    }
    const double tol = 1e-12 * std::max(1.0, bottom - top);
    if (pieces_.front().z0 > top + tol || pieces_.back().z1 < bottom - tol) {
      throw std::invalid_argument("depth profile: pieces must cover the vessel");
    }
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      if (!(pieces_[i].z1 > pieces_[i].z0)) {
        throw std::invalid_argument("depth profile: empty piece " + std::to_string(i));
      }
      if (i > 0 && std::abs(pieces_[i - 1].z1 - pieces_[i].z0) > tol) {
        throw std::invalid_argument("depth profile: gap or overlap before piece " + std::to_string(i));
      }
    }
  }

  double value(double z) const {
    for (const auto& p : pieces_) {
      if (z < p.z1) {
        return p.a + p.b * std::max(z, p.z0);
      }
    }
    const auto& last = pieces_.back();
    return last.a + last.b * last.z1;
  }

  /// Mean over [lo, hi], with the profile frozen at its values at `top` above
  /// `top` and at `bottom` below `bottom`.
  double cell_average(double lo, double hi, double top, double bottom) const {
    const double len = hi - lo;
    double total = 0.0;
    if (lo < top) {
      total += value(top) * (std::min(hi, top) - lo);
    }
    if (hi > bottom) {
      total += value_from_above(bottom) * (hi - std::max(lo, bottom));
    }
    const double a0 = std::max(lo, top);
    const double b0 = std::min(hi, bottom);
    for (const auto& p : pieces_) {
      const double x0 = std::max(a0, p.z0);
      const double x1 = std::min(b0, p.z1);
      if (x1 > x0) {
        total += p.a * (x1 - x0) + 0.5 * p.b * (x1 * x1 - x0 * x0);
      }
    }
    return total / len;
  }

  bool operator==(const DepthProfile&) const = default;

 private:
  double value_from_above(double z) const {
    for (const auto& p : pieces_) {
      if (z <= p.z1 && z > p.z0) {
        return p.a + p.b * z;
      }
    }
    return value(z);
  }

  std::vector<Piece> pieces_;
};

}  // namespace settler
