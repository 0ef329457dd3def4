// Copyright 2026 The eshpc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ESHPC_CERTIFICATES_HPP_
#define ESHPC_CERTIFICATES_HPP_

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "eshpc/core.hpp"
#include "eshpc/dynamics.hpp"
#include "eshpc/params.hpp"

namespace eshpc {

/// Gains of the three Lyapunov components (quadrotor translation, rotation,
/// payload translation). Validity conditions are checked by validate_gains.
struct CertificateGains {
  double k_q = 8.0, k_vq = 4.0, c_1 = 1.0;
  double k_r = 5.0, k_omega = 2.0, c_2 = 0.05;
  double k_l = 6.0, k_vl = 3.0, c_3 = 0.5;
};

/// Tracking reference for one instant: quadrotor and payload translation
/// plus the flatness attitude.
struct ReferencePoint {
  Vec3 quad_pos = Vec3::Zero();
  Vec3 quad_vel = Vec3::Zero();
  Vec3 quad_acc = Vec3::Zero();
  Vec3 load_pos = Vec3::Zero();
  Vec3 load_vel = Vec3::Zero();
  UnitQuaternion attitude;       // q_ref
  Vec3 body_rate = Vec3::Zero(); // ω_ref, desired body frame
};

/// Reference second derivatives consumed by the analytic V̇.
struct ReferenceRates {
  Vec3 load_acc = Vec3::Zero();
  Vec3 body_rate_dot = Vec3::Zero();  // ω̇_ref
};

struct ErrorVector {
  Vec3 e_p = Vec3::Zero();    // quadrotor position
  Vec3 e_v = Vec3::Zero();    // quadrotor velocity
  Vec3 e_rot = Vec3::Zero();  // attitude, ½(RdᵀR − RᵀRd)∨
  Vec3 e_omega = Vec3::Zero();
  Vec3 e_pl = Vec3::Zero();   // payload position
  Vec3 e_vl = Vec3::Zero();   // payload velocity
  double psi = 0.0;           // Ψ(R, Rd) = ½ tr(I − RdᵀR)
  bool near_antipode = false; // Ψ ≥ 2 − 1e-6: certificate bounds invalid here

  /// z = [‖e_p‖, ‖e_v‖, ‖e_R‖, ‖e_ω‖, ‖e_pL‖, ‖e_vL‖].
  Vec6 norms() const {
    Vec6 z;
    z << e_p.norm(), e_v.norm(), e_rot.norm(), e_omega.norm(), e_pl.norm(),
        e_vl.norm();
    return z;
  }
};

inline ErrorVector compute_errors(const SystemState& s,
                                  const ReferencePoint& ref) {
  ErrorVector e;
  e.e_p = s.quad_pos - ref.quad_pos;
  e.e_v = s.quad_vel - ref.quad_vel;
  e.e_pl = s.load_pos - ref.load_pos;
  e.e_vl = s.load_vel - ref.load_vel;

  const Mat3 r = quat_to_rot(s.attitude);
  const Mat3 rd = quat_to_rot(ref.attitude);
  e.e_rot = 0.5 * vee(rd.transpose() * r - r.transpose() * rd);
  e.e_omega = s.body_rate - r.transpose() * rd * ref.body_rate;
  e.psi = 0.5 * (Mat3::Identity() - rd.transpose() * r).trace();
  e.near_antipode = e.psi >= 2.0 - 1e-6;
  return e;
}

struct ClfValue {
  double total = 0.0;
  double quad_translation = 0.0;  // V_xQ
  double rotation = 0.0;          // V_q
  double load = 0.0;              // V_xL (already gated by s in `total`)
};

/// V = V_xQ + V_q + s·V_xL.
inline ClfValue clf_value(const ErrorVector& e, const CertificateGains& g,
                          const VehicleParams& p, int s) {
  ClfValue v;
  v.quad_translation = 0.5 * g.k_q * e.e_p.squaredNorm() +
                       0.5 * p.mass_quad * e.e_v.squaredNorm() +
                       g.c_1 * e.e_p.dot(e.e_v);
  v.rotation = g.k_r * e.psi + 0.5 * e.e_omega.dot(p.inertia * e.e_omega) +
               g.c_2 * e.e_rot.dot(e.e_omega);
  v.load = 0.5 * g.k_l * e.e_pl.squaredNorm() +
           0.5 * p.mass_load * e.e_vl.squaredNorm() +
           g.c_3 * e.e_pl.dot(e.e_vl);
  v.total = v.quad_translation + v.rotation + (s == 1 ? v.load : 0.0);
  return v;
}

/// 2×2 Cauchy–Schwarz bound blocks for each Lyapunov component plus the
/// assembled 6×6 block diagonals. The attitude lower block uses the exact
/// relation ‖e_R‖² = Ψ(2 − Ψ), which gives Ψ ≥ ½‖e_R‖² globally; the upper
/// block's 2‖e_R‖² envelope of Ψ is valid for Ψ ≤ 3/2.
struct BoundMatrices {
  Mat2 lower_quad, lower_rot, lower_load;
  Mat2 upper_quad, upper_rot, upper_load;

  Mat6 lower(int s) const {
    Mat6 m = Mat6::Zero();
    m.block<2, 2>(0, 0) = lower_quad;
    m.block<2, 2>(2, 2) = lower_rot;
    m.block<2, 2>(4, 4) = (s == 1 ? 1.0 : 0.0) * lower_load;
    return m;
  }
  Mat6 upper(int s) const {
    Mat6 m = Mat6::Zero();
    m.block<2, 2>(0, 0) = upper_quad;
    m.block<2, 2>(2, 2) = upper_rot;
    m.block<2, 2>(4, 4) = (s == 1 ? 1.0 : 0.0) * upper_load;
    return m;
  }
};

namespace detail {
inline void require_pd_block(const Mat2& m, const std::string& condition) {
  if (!(m(0, 0) > 0.0) || !(m.determinant() > 0.0))
    throw GainValidationError("gain validation failed: " + condition);
}
}  // namespace detail

inline BoundMatrices bound_matrices(const CertificateGains& g,
                                    const VehicleParams& p) {
  const double lam_min = p.min_inertia_eigenvalue();
  const double lam_max = p.max_inertia_eigenvalue();
  BoundMatrices b;
  b.lower_quad << g.k_q, -g.c_1, -g.c_1, p.mass_quad;
  b.lower_quad *= 0.5;
  b.upper_quad << g.k_q, g.c_1, g.c_1, p.mass_quad;
  b.upper_quad *= 0.5;
  b.lower_rot << g.k_r, -g.c_2, -g.c_2, lam_min;
  b.lower_rot *= 0.5;
  b.upper_rot << 4.0 * g.k_r, g.c_2, g.c_2, lam_max;
  b.upper_rot *= 0.5;
  b.lower_load << g.k_l, -g.c_3, -g.c_3, p.mass_load;
  b.lower_load *= 0.5;
  b.upper_load << g.k_l, g.c_3, g.c_3, p.mass_load;
  b.upper_load *= 0.5;

  detail::require_pd_block(b.lower_quad, "k_q·m_Q > c_1² (quadrotor translation lower bound)");
  detail::require_pd_block(b.lower_rot, "k_R·λ_m > c_2² (rotation lower bound)");
  detail::require_pd_block(b.lower_load, "k_l·m_L > c_3² (payload translation lower bound)");
  detail::require_pd_block(b.upper_quad, "upper quadrotor translation bound PD");
  detail::require_pd_block(b.upper_rot, "upper rotation bound PD");
  detail::require_pd_block(b.upper_load, "upper payload translation bound PD");
  return b;
}

/// Decrease-rate weight blocks. W₁ and W₂ follow the geometric-control
/// construction with each subsystem's own mass scale; W₃ uses m_L throughout
/// (the payload subsystem's mass).
struct WMatrices {
  Mat2 w1, w2, w3;

  Mat6 full(int s) const {
    Mat6 m = Mat6::Zero();
    m.block<2, 2>(0, 0) = w1;
    m.block<2, 2>(2, 2) = w2;
    m.block<2, 2>(4, 4) = (s == 1 ? 1.0 : 0.0) * w3;
    return m;
  }
};

inline WMatrices w_matrices(const CertificateGains& g,
                            const VehicleParams& p) {
  const double lam_min = p.min_inertia_eigenvalue();
  WMatrices w;
  w.w1 << g.c_1 * g.k_q / p.mass_quad, -g.c_1 * g.k_vq / (2.0 * p.mass_quad),
      -g.c_1 * g.k_vq / (2.0 * p.mass_quad), g.k_vq - g.c_1;
  w.w2 << g.c_2 * g.k_r / lam_min, g.c_2 * g.k_omega / (2.0 * lam_min),
      g.c_2 * g.k_omega / (2.0 * lam_min), g.k_omega - 0.5 * g.c_2;
  w.w3 << g.c_3 * g.k_l / p.mass_load, -g.c_3 * g.k_vl / (2.0 * p.mass_load),
      -g.c_3 * g.k_vl / (2.0 * p.mass_load), g.k_vl - g.c_3;

  detail::require_pd_block(w.w1, "W₁ positive definite (requires c_1 > 0 and the k_q/k_vq conditions)");
  detail::require_pd_block(w.w2, "W₂ positive definite (requires c_2 > 0 and the k_R/k_ω conditions)");
  detail::require_pd_block(w.w3, "W₃ positive definite (requires c_3 > 0 and the k_l/k_vl conditions)");
  return w;
}

struct GainCheck {
  std::string name;
  double margin = 0.0;  // lhs − rhs of the strict inequality
  bool ok = false;
};

/// Evaluates the nine scalar gain inequalities plus positive definiteness of
/// every bound and decrease block. Report-only; see require_valid_gains.
inline std::vector<GainCheck> validate_gains(const CertificateGains& g,
                                             const VehicleParams& p) {
  const double lam_min = p.min_inertia_eigenvalue();
  std::vector<GainCheck> checks;
  auto add = [&checks](const std::string& name, double lhs, double rhs) {
    checks.push_back({name, lhs - rhs, lhs > rhs});
  };

  add("c_1 > 0", g.c_1, 0.0);
  add("k_vq > c_1 + 1/4", g.k_vq, g.c_1 + 0.25);
  {
    const double den = p.mass_quad * (4.0 * (g.k_vq - g.c_1) - 1.0);
    const double num = g.c_1 * g.k_vq * g.k_vq + 2.0 * g.c_1 * g.k_vq - g.c_1 * g.c_1;
    const bool well_posed = den > 0.0;
    add("k_q > (c_1·k_vq² + 2c_1·k_vq − c_1²) / (m_Q(4(k_vq − c_1) − 1))",
        g.k_q, well_posed ? num / den : std::numeric_limits<double>::infinity());
  }

  add("c_2 > 0", g.c_2, 0.0);
  add("k_ω > ½c_2 + 1/4", g.k_omega, 0.5 * g.c_2 + 0.25);
  {
    const double den = lam_min * (4.0 * (g.k_omega - 0.5 * g.c_2) - 1.0);
    const double num = g.c_2 * g.k_omega * g.k_omega;
    const bool well_posed = den > 0.0;
    add("k_R > c_2·k_ω² / (λ_m(4(k_ω − ½c_2) − 1))", g.k_r,
        well_posed ? num / den : std::numeric_limits<double>::infinity());
  }

  add("c_3 > 0", g.c_3, 0.0);
  add("k_vl > c_3 + 1/4", g.k_vl, g.c_3 + 0.25);
  {
    const double den = p.mass_load * (4.0 * (g.k_vl - g.c_3) - 1.0);
    const double num = g.c_3 * g.k_vl * g.k_vl + 2.0 * g.c_3 * g.k_vl - g.c_3 * g.c_3;
    const bool well_posed = den > 0.0;
    add("k_l > (c_3·k_vl² + 2c_3·k_vl − c_3²) / (m_L(4(k_vl − c_3) − 1))",
        g.k_l, well_posed ? num / den : std::numeric_limits<double>::infinity());
  }

  auto add_pd = [&checks](const std::string& name, const Mat2& m) {
    const double det = m.determinant();
    checks.push_back({name + " positive definite", std::min(m(0, 0), det),
                      m(0, 0) > 0.0 && det > 0.0});
  };
  CertificateGains gc = g;
  // Block definitions without throwing, for reporting.
  const double lam_max = p.max_inertia_eigenvalue();
  Mat2 lq, lr, ll, uq, ur, ul, w1, w2, w3;
  lq << gc.k_q, -gc.c_1, -gc.c_1, p.mass_quad;
  lr << gc.k_r, -gc.c_2, -gc.c_2, lam_min;
  ll << gc.k_l, -gc.c_3, -gc.c_3, p.mass_load;
  uq << gc.k_q, gc.c_1, gc.c_1, p.mass_quad;
  ur << 4.0 * gc.k_r, gc.c_2, gc.c_2, lam_max;
  ul << gc.k_l, gc.c_3, gc.c_3, p.mass_load;
  w1 << gc.c_1 * gc.k_q / p.mass_quad, -gc.c_1 * gc.k_vq / (2.0 * p.mass_quad),
      -gc.c_1 * gc.k_vq / (2.0 * p.mass_quad), gc.k_vq - gc.c_1;
  w2 << gc.c_2 * gc.k_r / lam_min, gc.c_2 * gc.k_omega / (2.0 * lam_min),
      gc.c_2 * gc.k_omega / (2.0 * lam_min), gc.k_omega - 0.5 * gc.c_2;
  w3 << gc.c_3 * gc.k_l / p.mass_load, -gc.c_3 * gc.k_vl / (2.0 * p.mass_load),
      -gc.c_3 * gc.k_vl / (2.0 * p.mass_load), gc.k_vl - gc.c_3;
  add_pd("Q_lower quadrotor block", 0.5 * lq);
  add_pd("Q_lower rotation block", 0.5 * lr);
  add_pd("L_lower payload block", 0.5 * ll);
  add_pd("Q_upper quadrotor block", 0.5 * uq);
  add_pd("Q_upper rotation block", 0.5 * ur);
  add_pd("L_upper payload block", 0.5 * ul);
  add_pd("W1 block", w1);
  add_pd("W2 block", w2);
  add_pd("W3 block", w3);
  return checks;
}

inline void require_valid_gains(const CertificateGains& g,
                                const VehicleParams& p) {
  std::string failures;
  for (const auto& c : validate_gains(g, p))
    if (!c.ok) failures += (failures.empty() ? "" : "; ") + c.name;
  if (!failures.empty())
    throw GainValidationError("gain validation failed: " + failures);
}

/// Analytic time derivative of V along the closed-loop flow, with the
/// reference advancing at the supplied rates. Exact chain rule; the attitude
/// part uses ė_R = ½(tr(RᵀRd)I − RᵀRd)e_ω and Ψ̇ = e_R·e_ω.
inline double clf_derivative(const SystemState& s, const ReferencePoint& ref,
                             const ReferenceRates& rates,
                             const ControlInput& u,
                             const CertificateGains& g,
                             const VehicleParams& p) {
  const ErrorVector e = compute_errors(s, ref);
  const StateDerivative d = state_derivative(s, u, p);

  const Vec3 de_p = e.e_v;
  const Vec3 de_v = d.quad_acc - ref.quad_acc;
  double vdot = g.k_q * e.e_p.dot(de_p) + p.mass_quad * e.e_v.dot(de_v) +
                g.c_1 * (de_p.dot(e.e_v) + e.e_p.dot(de_v));

  const Mat3 r = quat_to_rot(s.attitude);
  const Mat3 rd = quat_to_rot(ref.attitude);
  const Mat3 q = r.transpose() * rd;  // RᵀRd
  const Vec3 m = q * ref.body_rate;
  const Mat3 c_mat = 0.5 * (q.trace() * Mat3::Identity() - q);
  const Vec3 de_rot = c_mat * e.e_omega;
  const Vec3 de_omega =
      d.body_rate_dot + s.body_rate.cross(m) - q * rates.body_rate_dot;
  const double psi_dot = e.e_rot.dot(e.e_omega);
  vdot += g.k_r * psi_dot + e.e_omega.dot(p.inertia * de_omega) +
          g.c_2 * (de_rot.dot(e.e_omega) + e.e_rot.dot(de_omega));

  if (s.mode == 1) {
    const Vec3 de_pl = e.e_vl;
    const Vec3 de_vl = d.load_acc - rates.load_acc;
    vdot += g.k_l * e.e_pl.dot(de_pl) + p.mass_load * e.e_vl.dot(de_vl) +
            g.c_3 * (de_pl.dot(e.e_vl) + e.e_pl.dot(de_vl));
  }
  return vdot;
}

/// g_clf = V̇ + ‖z‖²_W; the decrease condition holds iff this is ≤ 0.
inline double clf_constraint_residual(const SystemState& s,
                                      const ReferencePoint& ref,
                                      const ReferenceRates& rates,
                                      const ControlInput& u,
                                      const CertificateGains& g,
                                      const VehicleParams& p,
                                      const WMatrices& w) {
  const ErrorVector e = compute_errors(s, ref);
  const Vec6 z = e.norms();
  const double decay = z.dot(w.full(s.mode) * z);
  return clf_derivative(s, ref, rates, u, g, p) + decay;
}

inline double clf_constraint_residual(const SystemState& s,
                                      const ReferencePoint& ref,
                                      const ReferenceRates& rates,
                                      const ControlInput& u,
                                      const CertificateGains& g,
                                      const VehicleParams& p) {
  return clf_constraint_residual(s, ref, rates, u, g, p, w_matrices(g, p));
}

}  // namespace eshpc

#endif  // ESHPC_CERTIFICATES_HPP_
