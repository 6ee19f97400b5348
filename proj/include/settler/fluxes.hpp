#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "settler/constitutive.hpp"

namespace settler {

inline double pos(double a) { return a > 0.0 ? a : 0.0; }
inline double neg(double a) { return a < 0.0 ? a : 0.0; }

/// J = (D_C(X_{j+1}) - D_C(X_j)) / dz inside the vessel, 0 on outer faces.
inline double jc_face(const Constitutive& law, double X_j, double X_j1, double dz, bool gamma_face) {
  if (!gamma_face) {
    return 0.0;
  }
  return (law.big_d_c(X_j1) - law.big_d_c(X_j)) / dz;
}

/// v = q + gamma (v_hs(X_{j+1}) - J), from precomputed v_hs(X_{j+1}) and D_C values.
inline double vx_from(double q_face, bool gamma_face, double vhs_j1, double Dc_j, double Dc_j1, double dz) {
  if (!gamma_face) {
    return q_face;
  }
  return q_face + (vhs_j1 - (Dc_j1 - Dc_j) / dz);
}

inline double vx_face(const Constitutive& law, double X_j, double X_j1, double q_face, bool gamma_face,
                      double dz) {
  if (!gamma_face) {
    return q_face;
  }
  return vx_from(q_face, true, law.hindered_settling(X_j1), law.big_d_c(X_j), law.big_d_c(X_j1), dz);
}

/// Phi_C = A (v^- C_{j+1} + v^+ C_j) written to `phi`; returns F_X = v^- X_{j+1} + v^+ X_j.
inline double phi_c_from(std::span<const double> C_j, std::span<const double> C_j1, double X_j, double X_j1,
                         double v, double A_face, std::span<double> phi) {
  const double vp = pos(v);
  const double vm = neg(v);
  for (std::size_t k = 0; k < phi.size(); ++k) {
    phi[k] = A_face * (vm * C_j1[k] + vp * C_j[k]);
  }
  return vm * X_j1 + vp * X_j;
}

inline double phi_c_face(const Constitutive& law, std::span<const double> C_j, std::span<const double> C_j1,
                         double X_j, double X_j1, double q_face, double A_face, bool gamma_face, double dz,
                         std::span<double> phi) {
  const double v = vx_face(law, X_j, X_j1, q_face, gamma_face, dz);
  return phi_c_from(C_j, C_j1, X_j, X_j1, v, A_face, phi);
}

/// Phi_S = A ((rho_X q - F_X)^- S_{j+1}/(rho_X - X_{j+1}) + (rho_X q - F_X)^+ S_j/(rho_X - X_j)
///            - gamma d (S_{j+1} - S_j)/dz)
inline void phi_s_face(std::span<const double> S_j, std::span<const double> S_j1, double X_j, double X_j1,
                       double F_X, double q_face, double A_face, bool gamma_face, double dz, double rho_X,
                       std::span<const double> diffusion, std::span<double> phi) {
  const double w = rho_X * q_face - F_X;
  const double up = pos(w) / (rho_X - X_j);
  const double down = neg(w) / (rho_X - X_j1);
  for (std::size_t k = 0; k < phi.size(); ++k) {
    double val = down * S_j1[k] + up * S_j[k];
    if (gamma_face && !diffusion.empty()) {
      val -= diffusion[k] * (S_j1[k] - S_j[k]) / dz;
    }
    phi[k] = A_face * val;
  }
}

/// Per-face record of all flux quantities, for inspection and tests.
struct FaceFluxes {
  std::vector<double> phi_C;  // faces x k_C, kg/s
  std::vector<double> phi_S;  // faces x k_S, kg/s
  std::vector<double> F_X;    // kg/(m^2 s)
  std::vector<double> v_X;    // m/s
  std::vector<double> J_C;    // m/s
};

}  // namespace settler
