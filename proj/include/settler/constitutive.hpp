#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "settler/numerics.hpp"

namespace settler {

/// Material constants for hindered settling and compression. Defaults are the
/// activated-sludge values used by the builtin scenarios.
struct ConstitutiveParams {
  double v0 = 1.76e-3;      // m/s
  double X_bar = 3.87;      // kg/m^3
  double eta = 3.58;        // -
  double X_c = 5.0;         // kg/m^3
  double alpha = 0.2;       // m^2/s^2
  double rho_X = 1050.0;    // kg/m^3
  double rho_L = 998.0;     // kg/m^3
  double g = 9.81;          // m/s^2
  double X_max = 30.0;      // kg/m^3

  void validate() const {
    if (!(0.0 < X_c && X_c < X_max && X_max < rho_X)) {
      throw std::invalid_argument("constitutive: require 0 < X_c < X_max < rho_X");
    }
    if (!(rho_L < rho_X)) {
      throw std::invalid_argument("constitutive: require rho_L < rho_X");
    }
    if (!(v0 > 0.0) || !(eta > 1.0) || !(alpha >= 0.0) || !(X_bar > 0.0) || !(g > 0.0)) {
      throw std::invalid_argument("constitutive: require v0 > 0, eta > 1, alpha >= 0, X_bar > 0, g > 0");
    }
  }

  bool operator==(const ConstitutiveParams&) const = default;
};

/// Optional replacement for the builtin v_hs / sigma_e' laws. Empty members
/// fall back to the builtin formulas.
struct MaterialLaw {
  std::function<double(double)> hindered_settling;
  std::function<double(double)> hindered_settling_derivative;
  std::function<double(double)> stress_derivative;  // right-continuous at X_c
};

/// Suprema over [0, X_max] entering the time-step restrictions.
struct ConstitutiveNorms {
  double vhs_sup = 0.0;          // ||v_hs||
  double vhs_at_zero = 0.0;      // v_hs(0)
  double vhs_prime_sup = 0.0;    // ||v_hs'||
  double dc_sup = 0.0;           // ||d_C||
  double big_dc_at_max = 0.0;    // D_C(X_max)
  double flux_sup = 0.0;         // ||f||
  double flux_prime_sup = 0.0;   // ||f'||
  double xp_d_prime_sup = 0.0;   // ||D'|| of the percentage-scheme primitive
  double xp_d_at_max = 0.0;      // D(X_max) of the percentage-scheme primitive
};

class Constitutive {
 public:
  static constexpr std::size_t kDefaultTableSize = 4096;

  explicit Constitutive(const ConstitutiveParams& p = {}, MaterialLaw law = {},
                        std::size_t table_size = kDefaultTableSize)
      : p_(p), law_(std::move(law)) {
    p_.validate();
    delta_rho_ = p_.rho_X - p_.rho_L;
    r_ = p_.rho_L / p_.rho_X;
    stress_scale_ = p_.rho_X / (p_.g * delta_rho_);
    inv_X_bar_ = 1.0 / p_.X_bar;
    dc_table_ = PrimitiveTable([this](double x) { return dc_right(x); }, p_.X_c, p_.X_max, table_size);
    xp_table_ = PrimitiveTable([this](double x) { return xp_d_prime_right(x); }, p_.X_c, p_.X_max,
                               table_size);
    flux_max_ = locate_flux_maximizer();
    compute_norms();
  }

  const ConstitutiveParams& params() const { return p_; }
  double X_max() const { return p_.X_max; }
  double rho_X() const { return p_.rho_X; }
  double rho_L() const { return p_.rho_L; }
  double delta_rho() const { return delta_rho_; }
  /// r = rho_L / rho_X
  double density_ratio() const { return r_; }
  const ConstitutiveNorms& norms() const { return norms_; }

  // -- checked public evaluations --------------------------------------

  double hindered_settling(double X) const {
    check_domain(X, "hindered_settling");
    return vhs(X);
  }

  double hindered_settling_derivative(double X) const {
    check_domain(X, "hindered_settling_derivative");
    return vhs_prime(X);
  }

  /// sigma_e'(X); zero at the kink X = X_c.
  double sigma_e_prime(double X) const {
    check_domain(X, "sigma_e_prime");
    return X <= p_.X_c ? 0.0 : stress_prime_right(X);
  }

  double d_c(double X) const {
    check_domain(X, "d_c");
    return X <= p_.X_c ? 0.0 : dc_right(X);
  }

  double big_d_c(double X) const {
    check_domain(X, "big_d_c");
    return dc_table_(X);
  }

  /// f(X) = v_hs(X) X
  double batch_flux(double X) const {
    check_domain(X, "batch_flux");
    return flux(X);
  }

  double batch_flux_derivative(double X) const {
    check_domain(X, "batch_flux_derivative");
    return vhs(X) + X * vhs_prime(X);
  }

  /// Interior maximizer of the unimodal batch flux.
  double flux_maximizer() const { return flux_max_; }

  /// D(X) = rho_X/(g drho) * integral_{X_c}^{X} v_hs sigma_e' ds (no 1/X factor).
  double xp_compression(double X) const {
    check_domain(X, "xp_compression");
    return xp_table_(X);
  }

  double xp_compression_derivative(double X) const {
    check_domain(X, "xp_compression_derivative");
    return X <= p_.X_c ? 0.0 : xp_d_prime_right(X);
  }

  // -- unchecked kernels for the stepping loops -------------------------

  double vhs(double X) const {
    if (law_.hindered_settling) {
      return law_.hindered_settling(X);
    }
    return p_.v0 / (1.0 + std::pow(X * inv_X_bar_, p_.eta));
  }

  double vhs_prime(double X) const {
    if (law_.hindered_settling_derivative) {
      return law_.hindered_settling_derivative(X);
    }
    if (X <= 0.0) {
      return 0.0;
    }
    const double u = std::pow(X * inv_X_bar_, p_.eta);
    return -p_.v0 * p_.eta * u / (X * (1.0 + u) * (1.0 + u));
  }

  double flux(double X) const { return vhs(X) * X; }
  double big_dc_unchecked(double X) const { return dc_table_(X); }
  double xp_compression_unchecked(double X) const { return xp_table_(X); }

 private:
  void check_domain(double X, const char* what) const {
    if (!(X >= 0.0 && X <= p_.X_max)) {
      throw std::domain_error(std::string(what) + ": concentration " + std::to_string(X) +
                              " outside [0, X_max]");
    }
  }

  double stress_prime_right(double X) const {
    if (law_.stress_derivative) {
      return law_.stress_derivative(X);
    }
    return X >= p_.X_c ? p_.alpha : 0.0;
  }

  // d_C with sigma_e' taken from the right at X_c; the table integrand.
  double dc_right(double X) const {
    if (X < p_.X_c || X <= 0.0) {
      return 0.0;
    }
    return vhs(X) * stress_scale_ * stress_prime_right(X) / X;
  }

  double xp_d_prime_right(double X) const {
    if (X < p_.X_c) {
      return 0.0;
    }
    return stress_scale_ * vhs(X) * stress_prime_right(X);
  }

  double locate_flux_maximizer() const {
    // Bisection on f' for the builtin-shaped unimodal flux.
    auto fprime = [this](double X) { return vhs(X) + X * vhs_prime(X); };
    double lo = 0.0;
    double hi = p_.X_max;
    if (fprime(hi) >= 0.0) {
      return hi;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
      const double mid = 0.5 * (lo + hi);
      (fprime(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  void compute_norms() {
    const double xm = p_.X_max;
    norms_.vhs_at_zero = vhs(0.0);
    norms_.vhs_sup = sup_abs([this](double x) { return vhs(x); }, 0.0, xm);
    norms_.vhs_prime_sup = sup_abs([this](double x) { return vhs_prime(x); }, 0.0, xm);
    norms_.dc_sup = sup_abs([this](double x) { return dc_right(x); }, p_.X_c, xm);
    norms_.big_dc_at_max = dc_table_.upper_value();
    norms_.flux_sup = std::abs(flux(flux_max_));
    norms_.flux_prime_sup =
        sup_abs([this](double x) { return vhs(x) + x * vhs_prime(x); }, 0.0, xm);
    norms_.xp_d_prime_sup = sup_abs([this](double x) { return xp_d_prime_right(x); }, p_.X_c, xm);
    norms_.xp_d_at_max = xp_table_.upper_value();
  }

  ConstitutiveParams p_;
  MaterialLaw law_;
  double delta_rho_ = 0.0;
  double r_ = 0.0;
  double stress_scale_ = 0.0;
  double inv_X_bar_ = 0.0;
  double flux_max_ = 0.0;
  PrimitiveTable dc_table_;
  PrimitiveTable xp_table_;
  ConstitutiveNorms norms_;
};

}  // namespace settler
