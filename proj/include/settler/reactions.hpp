#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/random/sobol.hpp>

namespace settler {

/// Upper bounds for reaction-rate derivatives over the admissible set, used by
/// the time-step restrictions. Each bound covers the full Jacobian row, i.e.
/// sup over k and l of |dR^(k)/dU^(l)|, which also bounds the own-variable case.
struct ReactionBounds {
  double M_C = 0.0;        // sup |dR_C^(k)/dC^(l)|
  double M_C_total = 0.0;  // sup |d(sum_k R_C^(k))/dC^(l)|
  double M_S = 0.0;        // sup |dR_S^(k)/dS^(l)|
  double M_S_total = 0.0;  // sup |d(sum_k R_C^(k))/dS^(l)|, percentage scheme only
};

/// Reaction plugin: pointwise rates for k_C solid and k_S soluble components.
class ReactionModel {
 public:
  virtual ~ReactionModel() = default;

  virtual std::size_t num_solids() const = 0;
  virtual std::size_t num_solubles() const = 0;
  virtual std::string name() const = 0;

  /// Writes R_C (length k_C) and R_S (length k_S) in kg/(m^3 s).
  virtual void rates(std::span<const double> C, std::span<const double> S, std::span<double> R_C,
                     std::span<double> R_S) const = 0;

  virtual ReactionBounds derivative_bounds() const = 0;
};

/// R = 0 for every component.
class NoReactions final : public ReactionModel {
 public:
  NoReactions(std::size_t k_C, std::size_t k_S) : k_C_(k_C), k_S_(k_S) {}

  std::size_t num_solids() const override { return k_C_; }
  std::size_t num_solubles() const override { return k_S_; }
  std::string name() const override { return "none"; }

  void rates(std::span<const double>, std::span<const double>, std::span<double> R_C,
             std::span<double> R_S) const override {
    std::fill(R_C.begin(), R_C.end(), 0.0);
    std::fill(R_S.begin(), R_S.end(), 0.0);
  }

  ReactionBounds derivative_bounds() const override { return {}; }

 private:
  std::size_t k_C_;
  std::size_t k_S_;
};

enum class ZMode { identity, ramp };

struct DenitrificationParams {
  double Y = 0.67;          // yield
  double b = 6.94e-6;       // decay rate, 1/s
  double f_P = 0.2;         // undegradable fraction of decay
  double mu_max = 5.56e-5;  // 1/s
  double K_NO3 = 5e-4;      // kg/m^3
  double K_S = 0.02;        // kg/m^3
  ZMode z_mode = ZMode::identity;
  double X_Z_fraction = 0.95;  // ramp starts at X_Z = fraction * X_max

  void validate() const {
    if (!(Y > 0.0 && Y < 1.0)) {
      throw std::invalid_argument("denitrification: require 0 < Y < 1");
    }
    if (!(f_P >= 0.0 && f_P <= 1.0)) {
      throw std::invalid_argument("denitrification: require 0 <= f_P <= 1");
    }
    if (!(b >= 0.0) || !(mu_max >= 0.0) || !(K_NO3 > 0.0) || !(K_S > 0.0)) {
      throw std::invalid_argument("denitrification: rates must be nonnegative and K > 0");
    }
    if (!(X_Z_fraction > 0.0 && X_Z_fraction < 1.0)) {
      throw std::invalid_argument("denitrification: ramp start fraction must lie in (0, 1)");
    }
  }

  bool operator==(const DenitrificationParams&) const = default;
};

/// Denitrification with C = (X_OHO, X_U) and S = (S_NO3, S_S, S_N2).
class Denitrification final : public ReactionModel {
 public:
  explicit Denitrification(const DenitrificationParams& p = {}, double X_max = 30.0)
      : p_(p), X_max_(X_max) {
    p_.validate();
    Ybar_ = (1.0 - p_.Y) / (2.86 * p_.Y);
    X_Z_ = p_.X_Z_fraction * X_max_;
  }

  std::size_t num_solids() const override { return 2; }
  std::size_t num_solubles() const override { return 3; }
  std::string name() const override { return "denitrification"; }

  const DenitrificationParams& params() const { return p_; }
  double Ybar() const { return Ybar_; }

  double growth_rate(std::span<const double> S) const {
    const double n = S[0];
    const double s = S[1];
    return p_.mu_max * n / (p_.K_NO3 + n) * s / (p_.K_S + s);
  }

  double z_factor(double X) const {
    if (p_.z_mode == ZMode::identity) {
      return 1.0;
    }
    return std::clamp((X_max_ - X) / (X_max_ - X_Z_), 0.0, 1.0);
  }

  void rates(std::span<const double> C, std::span<const double> S, std::span<double> R_C,
             std::span<double> R_S) const override {
    const double x_oho = C[0];
    const double mu = growth_rate(S);
    const double z = z_factor(C[0] + C[1]);
    R_C[0] = x_oho * z * (mu - p_.b);
    R_C[1] = x_oho * z * p_.f_P * p_.b;
    R_S[0] = -x_oho * Ybar_ * mu;
    R_S[1] = x_oho * ((1.0 - p_.f_P) * p_.b - mu / p_.Y);
    R_S[2] = x_oho * Ybar_ * mu;
  }

  /// (sum of R_C, sum of R_S); the nitrogen terms cancel in the latter.
  std::pair<double, double> aggregates(std::span<const double> C, std::span<const double> S) const {
    const double x_oho = C[0];
    const double mu = growth_rate(S);
    const double z = z_factor(C[0] + C[1]);
    return {(mu - (1.0 - p_.f_P) * p_.b) * x_oho * z, x_oho * ((1.0 - p_.f_P) * p_.b - mu / p_.Y)};
  }

  /// Analytic bounds: 0 <= mu <= mu_max, |dmu/dS| <= mu_max / K per Monod
  /// factor (attained at S = 0), X_OHO <= X_max, and for the ramp |Z'| <= 1/(X_max - X_Z).
  ReactionBounds derivative_bounds() const override {
    const double zeta = p_.z_mode == ZMode::ramp ? X_max_ / (X_max_ - X_Z_) : 0.0;
    const double k_min = std::min(p_.K_NO3, p_.K_S);
    ReactionBounds out;
    out.M_C = std::max(p_.mu_max, p_.b) * (1.0 + zeta);
    out.M_C_total = std::max(p_.mu_max, (1.0 - p_.f_P) * p_.b) * (1.0 + zeta);
    out.M_S = X_max_ * p_.mu_max * std::max(Ybar_, 1.0 / p_.Y) / k_min;
    out.M_S_total = X_max_ * p_.mu_max / k_min;
    return out;
  }

 private:
  DenitrificationParams p_;
  double X_max_;
  double Ybar_ = 0.0;
  double X_Z_ = 0.0;
};

/// Derivative bounds of an arbitrary model by central differences at Sobol
/// points of the box {C >= 0, sum C <= X_max} x [0, S_box]^k_S, times a safety factor.
inline ReactionBounds sampled_derivative_bounds(const ReactionModel& model, double X_max,
                                                double S_box, std::size_t points = 1000000,
                                                double safety = 1.05) {
  const std::size_t kc = model.num_solids();
  const std::size_t ks = model.num_solubles();
  const std::size_t dim = kc + ks;
  boost::random::sobol gen(dim);
  const double scale = 1.0 / (static_cast<double>(gen.max() - gen.min()) + 1.0);

  std::vector<double> C(kc), S(ks), Cp(kc), Sp(ks), RCp(kc), RSp(ks), RCm(kc), RSm(ks);
  ReactionBounds out;
  for (std::size_t n = 0; n < points; ++n) {
    double sum = 0.0;
    for (std::size_t k = 0; k < kc; ++k) {
      C[k] = X_max * static_cast<double>(gen() - gen.min()) * scale;
      sum += C[k];
    }
    if (sum > X_max) {
      for (auto& c : C) c *= X_max / sum;
    }
    for (std::size_t k = 0; k < ks; ++k) {
      S[k] = S_box * static_cast<double>(gen() - gen.min()) * scale;
    }
    for (std::size_t l = 0; l < dim; ++l) {
      const bool solid = l < kc;
      double& x = solid ? C[l] : S[l - kc];
      const double h = 1e-7 * (solid ? X_max : S_box);
      const double lo = std::max(0.0, x - h);
      const double hi = x + h;
      const double saved = x;
      x = hi;
      model.rates(C, S, RCp, RSp);
      x = lo;
      model.rates(C, S, RCm, RSm);
      x = saved;
      const double inv = 1.0 / (hi - lo);
      double dtotal = 0.0;
      for (std::size_t k = 0; k < kc; ++k) {
        const double d = (RCp[k] - RCm[k]) * inv;
        dtotal += d;
        if (solid) out.M_C = std::max(out.M_C, std::abs(d));
      }
      if (solid) {
        out.M_C_total = std::max(out.M_C_total, std::abs(dtotal));
      } else {
        out.M_S_total = std::max(out.M_S_total, std::abs(dtotal));
        for (std::size_t k = 0; k < ks; ++k) {
          out.M_S = std::max(out.M_S, std::abs((RSp[k] - RSm[k]) * inv));
        }
      }
    }
  }
  out.M_C *= safety;
  out.M_C_total *= safety;
  out.M_S *= safety;
  out.M_S_total *= safety;
  return out;
}

}  // namespace settler
