#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace settler {

/// Supremum of |fn| on [a, b]: dense scan followed by golden-section
/// refinement inside the bracket around the best sample.
inline double sup_abs(const std::function<double(double)>& fn, double a, double b,
                      std::size_t samples = 4096, double tol = 1e-12) {
  if (!(b > a)) {
    return std::abs(fn(a));
  }
  const double h = (b - a) / static_cast<double>(samples - 1);
  std::size_t best = 0;
  double best_val = -1.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = (i + 1 == samples) ? b : a + h * static_cast<double>(i);
    const double v = std::abs(fn(x));
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  double lo = best == 0 ? a : a + h * static_cast<double>(best - 1);
  double hi = best + 1 >= samples ? b : a + h * static_cast<double>(best + 1);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = std::abs(fn(x1));
  double f2 = std::abs(fn(x2));
  while (hi - lo > tol * std::max(1.0, std::abs(lo))) {
    if (f1 > f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = std::abs(fn(x1));
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = std::abs(fn(x2));
    }
  }
  return std::max({best_val, f1, f2});
}

/// Composite Simpson on [a, b], doubling the panel count until the Richardson
/// error estimate |S_2m - S_m| / 15 drops below rel_tol (or abs_tol).
inline double simpson_richardson(const std::function<double(double)>& fn, double a, double b,
                                 double rel_tol = 1e-10, double abs_tol = 1e-300) {
  auto composite = [&](std::size_t m) {
    const double h = (b - a) / static_cast<double>(m);
    double s = fn(a) + fn(b);
    for (std::size_t i = 1; i < m; ++i) {
      s += fn(a + h * static_cast<double>(i)) * ((i % 2 == 1) ? 4.0 : 2.0);
    }
    return s * h / 3.0;
  };
  std::size_t m = 2;
  double coarse = composite(m);
  for (int iter = 0; iter < 30; ++iter) {
    m *= 2;
    const double fine = composite(m);
    const double err = std::abs(fine - coarse) / 15.0;
    if (err <= rel_tol * std::abs(fine) || err <= abs_tol) {
      return fine + (fine - coarse) / 15.0;
    }
    coarse = fine;
  }
  throw std::runtime_error("simpson_richardson: no convergence");
}

/// Uniform table of a primitive P(x) = integral_{x0}^{x} p(s) ds on [x0, x1],
/// evaluated by cubic Hermite interpolation with the exact integrand as slope.
/// P(x) = 0 for x <= x0.
class PrimitiveTable {
 public:
  PrimitiveTable() = default;

  PrimitiveTable(const std::function<double(double)>& integrand, double x0, double x1,
                 std::size_t nodes)
      : x0_(x0), x1_(x1) {
    if (nodes < 2 || !(x1 > x0)) {
      throw std::invalid_argument("PrimitiveTable: need at least two nodes on a nonempty range");
    }
    h_ = (x1 - x0) / static_cast<double>(nodes - 1);
    values_.resize(nodes);
    slopes_.resize(nodes);
    values_[0] = 0.0;
    for (std::size_t i = 0; i < nodes; ++i) {
      slopes_[i] = integrand(node(i));
      if (i > 0) {
        values_[i] = values_[i - 1] + simpson_richardson(integrand, node(i - 1), node(i));
      }
    }
  }

  double operator()(double x) const {
    if (x <= x0_) {
      return 0.0;
    }
    if (x >= x1_) {
      return values_.back();
    }
    const double s = (x - x0_) / h_;
    std::size_t i = static_cast<std::size_t>(s);
    if (i + 1 >= values_.size()) {
      i = values_.size() - 2;
    }
    const double t = s - static_cast<double>(i);
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return h00 * values_[i] + h10 * h_ * slopes_[i] + h01 * values_[i + 1] + h11 * h_ * slopes_[i + 1];
  }

  double upper_value() const { return values_.back(); }
  std::size_t size() const { return values_.size(); }

 private:
  double node(std::size_t i) const {
    return i + 1 == values_.size() ? x1_ : x0_ + h_ * static_cast<double>(i);
  }

  double x0_ = 0.0;
  double x1_ = 0.0;
  double h_ = 1.0;
  std::vector<double> values_;
  std::vector<double> slopes_;
};

}  // namespace settler
