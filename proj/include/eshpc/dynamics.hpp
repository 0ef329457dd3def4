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

#ifndef ESHPC_DYNAMICS_HPP_
#define ESHPC_DYNAMICS_HPP_

#include <optional>
#include <utility>

#include "eshpc/core.hpp"
#include "eshpc/params.hpp"

namespace eshpc {

/// Collective thrust along body z plus body torques.
struct ControlInput {
  double thrust = 0.0;  // N
  Vec3 torque = Vec3::Zero();  // N·m, body frame

  ControlInput clamped(const VehicleParams& p) const {
    ControlInput u = *this;
    u.thrust = std::clamp(u.thrust, 0.0, p.thrust_max);
    for (int i = 0; i < 3; ++i)
      u.torque(i) = std::clamp(u.torque(i), -p.torque_max, p.torque_max);
    return u;
  }
};

/// Full hybrid state. `mode` is the simulator's constraint flag: 1 while the
/// inextensible-cable constraint is active (‖x_L − x_Q‖ = l), 0 while the
/// cable is slack. detect_mode() below is the threshold classifier the
/// controller and estimator consume; the two agree except transiently inside
/// the ε band while the payload is ballistic.
struct SystemState {
  Vec3 load_pos = Vec3::Zero();   // x_L, world
  Vec3 load_vel = Vec3::Zero();   // world
  Vec3 quad_pos = Vec3::Zero();   // x_Q, world
  Vec3 quad_vel = Vec3::Zero();   // world
  UnitQuaternion attitude;        // q_WQ
  Vec3 body_rate = Vec3::Zero();  // ω, body frame
  Vec3 load_cam = Vec3::Zero();   // x_CL, camera frame (stored copy)
  int mode = 1;                   // s

  bool finite() const {
    return load_pos.allFinite() && load_vel.allFinite() &&
           quad_pos.allFinite() && quad_vel.allFinite() &&
           body_rate.allFinite() && load_cam.allFinite() &&
           std::isfinite(attitude.norm());
  }
};

/// Time derivative of SystemState (attitude slot holds dq/dt).
struct StateDerivative {
  Vec3 load_vel = Vec3::Zero();
  Vec3 load_acc = Vec3::Zero();
  Vec3 quad_vel = Vec3::Zero();
  Vec3 quad_acc = Vec3::Zero();
  Vec4 attitude_rate = Vec4::Zero();
  Vec3 body_rate_dot = Vec3::Zero();
  Vec3 load_cam_rate = Vec3::Zero();
};

/// Extra forces used by the experiment harness for disturbance injection.
/// Forces are world-frame, the moment is body-frame. The controller's model
/// never sees these.
struct ExternalWrench {
  Vec3 force_quad = Vec3::Zero();
  Vec3 force_load = Vec3::Zero();
  Vec3 moment = Vec3::Zero();
};

struct CableGeometry {
  Vec3 dir;        // ξ scaled by l: (x_L − x_Q)/l
  Vec3 dir_rate;   // (v_L − v_Q)/l
  Vec3 unit_dir;   // normalized copy for slack-mode bookkeeping
  double distance; // ‖x_L − x_Q‖
};

inline CableGeometry cable_geometry(const SystemState& s,
                                    const VehicleParams& p) {
  const Vec3 d = s.load_pos - s.quad_pos;
  const double dist = d.norm();
  if (dist == 0.0)
    throw ContractViolation(
        "cable_geometry: payload coincides with quadrotor (degenerate cable direction)");
  CableGeometry g;
  g.dir = d / p.cable_length;
  g.dir_rate = (s.load_vel - s.quad_vel) / p.cable_length;
  g.unit_dir = d / dist;
  g.distance = dist;
  return g;
}

/// Threshold mode classifier: slack iff ‖x_L − x_Q‖ < l − ε.
inline int detect_mode(const SystemState& s, const VehicleParams& p) {
  const double dist = (s.load_pos - s.quad_pos).norm();
  return dist < p.cable_length - p.mode_margin ? 0 : 1;
}

/// Cable tension while the constraint is active. Negative values (cable
/// would have to push) are clamped to zero; `clamped` reports the event so
/// the stepper can release the constraint.
inline double tension(const SystemState& s, double thrust,
                      const VehicleParams& p,
                      const ExternalWrench& w = {},
                      bool* clamped = nullptr) {
  if (s.mode != 1)
    throw ContractViolation("tension: requires taut mode (s = 1)");
  const CableGeometry g = cable_geometry(s, p);
  const Mat3 r = quat_to_rot(s.attitude);
  const Vec3 thrust_world = r.col(2) * thrust;
  const double m_q = p.mass_quad, m_l = p.mass_load;
  double f_c = m_l / (m_l + m_q) *
                   (p.cable_length * m_q * g.dir_rate.squaredNorm() -
                    g.dir.dot(thrust_world + w.force_quad)) +
               m_q / (m_l + m_q) * g.dir.dot(w.force_load);
  if (clamped) *clamped = f_c < 0.0;
  if (f_c < 0.0) f_c = 0.0;
  return f_c;
}

/// Payload position and velocity expressed in the camera frame.
inline std::pair<Vec3, Vec3> project_payload_to_camera(
    const SystemState& s, const VehicleParams& p) {
  const Mat3 r_wq = quat_to_rot(s.attitude);
  const Mat3 r_qc = quat_to_rot(p.cam_mount);
  const Mat3 r_cq = r_qc.transpose();       // R(q_QC⁻¹)
  const Mat3 r_cw = r_cq * r_wq.transpose();
  const Vec3 rel = s.load_pos - s.quad_pos;
  const Vec3 pos = r_cw * rel - r_cq * p.cam_offset;
  const Vec3 omega_cam = r_cq * s.body_rate;
  const Vec3 vel = pos.cross(omega_cam) + r_cq * (p.cam_offset.cross(s.body_rate)) +
                   r_cw * (s.load_vel - s.quad_vel);
  return {pos, vel};
}

/// Full hybrid equations of motion. Tension coupling is active iff s = 1;
/// in slack mode both bodies fall ballistically (plus any external wrench).
inline StateDerivative state_derivative(const SystemState& s,
                                        const ControlInput& u,
                                        const VehicleParams& p,
                                        const ExternalWrench& w = {}) {
  if (!s.finite() || !std::isfinite(u.thrust) || !u.torque.allFinite())
    throw NumericError("state_derivative: non-finite input");
  const Mat3 r = quat_to_rot(s.attitude);
  const Vec3 z_w = Vec3::UnitZ();
  const Vec3 thrust_world = r.col(2) * u.thrust;
  const double m_q = p.mass_quad, m_l = p.mass_load;

  StateDerivative d;
  d.load_vel = s.load_vel;
  d.quad_vel = s.quad_vel;

  double f_c = 0.0;
  Vec3 xi = Vec3::Zero();
  if (s.mode == 1) {
    const CableGeometry g = cable_geometry(s, p);
    xi = g.dir;
    f_c = tension(s, u.thrust, p, w);
  }

  d.quad_acc = thrust_world / m_q - p.gravity * z_w +
               (f_c / m_q) * xi * (s.mode == 1 ? 1.0 : 0.0) +
               w.force_quad / m_q;
  d.load_acc = -(f_c / m_l) * xi * (s.mode == 1 ? 1.0 : 0.0) -
               p.gravity * z_w + w.force_load / m_l;
  d.body_rate_dot = p.inertia.inverse() *
                    (u.torque + w.moment - s.body_rate.cross(p.inertia * s.body_rate));
  d.attitude_rate = quat_kinematics(s.attitude, s.body_rate);

  // Camera-frame payload kinematics.
  const Mat3 r_qc = quat_to_rot(p.cam_mount);
  const Mat3 r_cq = r_qc.transpose();
  const Mat3 r_cw = r_cq * r.transpose();
  const Vec3 omega_cam = r_cq * s.body_rate;
  d.load_cam_rate = s.load_cam.cross(omega_cam) +
                    r_cq * (p.cam_offset.cross(s.body_rate)) +
                    r_cw * (s.load_vel - s.quad_vel);
  return d;
}

namespace detail {

inline SystemState add_scaled(const SystemState& s, const StateDerivative& d,
                              double h) {
  SystemState n = s;
  n.load_pos += h * d.load_vel;
  n.load_vel += h * d.load_acc;
  n.quad_pos += h * d.quad_vel;
  n.quad_vel += h * d.quad_acc;
  const Vec4 q = s.attitude.as_vec() + h * d.attitude_rate;
  n.attitude = UnitQuaternion{q(0), q(1), q(2), q(3)};  // renormalized by caller
  n.body_rate += h * d.body_rate_dot;
  n.load_cam += h * d.load_cam_rate;
  return n;
}

/// One classical RK4 stage sweep with the mode frozen; attitude renormalized.
inline SystemState rk4_raw(const SystemState& s, const ControlInput& u,
                           double dt, const VehicleParams& p,
                           const ExternalWrench& w = {}) {
  const StateDerivative k1 = state_derivative(s, u, p, w);
  const StateDerivative k2 = state_derivative(add_scaled(s, k1, 0.5 * dt), u, p, w);
  const StateDerivative k3 = state_derivative(add_scaled(s, k2, 0.5 * dt), u, p, w);
  const StateDerivative k4 = state_derivative(add_scaled(s, k3, dt), u, p, w);

  SystemState n = s;
  n.load_pos += dt / 6.0 * (k1.load_vel + 2 * k2.load_vel + 2 * k3.load_vel + k4.load_vel);
  n.load_vel += dt / 6.0 * (k1.load_acc + 2 * k2.load_acc + 2 * k3.load_acc + k4.load_acc);
  n.quad_pos += dt / 6.0 * (k1.quad_vel + 2 * k2.quad_vel + 2 * k3.quad_vel + k4.quad_vel);
  n.quad_vel += dt / 6.0 * (k1.quad_acc + 2 * k2.quad_acc + 2 * k3.quad_acc + k4.quad_acc);
  const Vec4 q = s.attitude.as_vec() +
                 dt / 6.0 * (k1.attitude_rate + 2 * k2.attitude_rate +
                             2 * k3.attitude_rate + k4.attitude_rate);
  n.attitude = UnitQuaternion::from_wxyz(q(0), q(1), q(2), q(3));
  n.body_rate += dt / 6.0 * (k1.body_rate_dot + 2 * k2.body_rate_dot +
                             2 * k3.body_rate_dot + k4.body_rate_dot);
  n.load_cam += dt / 6.0 * (k1.load_cam_rate + 2 * k2.load_cam_rate +
                            2 * k3.load_cam_rate + k4.load_cam_rate);
  return n;
}

}  // namespace detail

/// Snap the taut constraint: ‖x_L − x_Q‖ := l (moving the payload) and remove
/// the radial component of the payload's relative velocity.
inline SystemState project_taut_constraint(const SystemState& s,
                                           const VehicleParams& p) {
  SystemState n = s;
  const Vec3 d = n.load_pos - n.quad_pos;
  const double dist = d.norm();
  if (dist == 0.0)
    throw ContractViolation("project_taut_constraint: degenerate cable direction");
  const Vec3 xi = d / dist;
  n.load_pos = n.quad_pos + p.cable_length * xi;
  const Vec3 rel = n.load_vel - n.quad_vel;
  n.load_vel -= xi.dot(rel) * xi;
  return n;
}

/// Inelastic slack→taut impact: removes the separating component of the
/// relative velocity along the cable while conserving the linear momentum of
/// the two-body system.
inline SystemState apply_taut_impact(const SystemState& s,
                                     const VehicleParams& p) {
  SystemState n = s;
  const Vec3 d = n.load_pos - n.quad_pos;
  const double dist = d.norm();
  if (dist == 0.0)
    throw ContractViolation("apply_taut_impact: degenerate cable direction");
  const Vec3 xi = d / dist;
  const double sep = xi.dot(n.load_vel - n.quad_vel);
  if (sep > 0.0) {
    const double mu = p.mass_quad * p.mass_load / (p.mass_quad + p.mass_load);
    const double impulse = mu * sep;
    n.load_vel -= (impulse / p.mass_load) * xi;
    n.quad_vel += (impulse / p.mass_quad) * xi;
  }
  n.mode = 1;
  return project_taut_constraint(n, p);
}

inline Vec3 recompute_load_cam(const SystemState& s, const VehicleParams& p) {
  return project_payload_to_camera(s, p).first;
}

/// Fixed-mode RK4 step used by the shooting transcription: integrates the
/// smooth vector field with s frozen, renormalizes the attitude, refreshes
/// the stored camera-frame payload position. No event handling, no
/// constraint projection.
inline SystemState rk4_step_fixed_mode(const SystemState& s,
                                       const ControlInput& u, double dt,
                                       const VehicleParams& p) {
  if (!(dt > 0.0)) throw ContractViolation("rk4_step_fixed_mode: dt must be > 0");
  SystemState n = detail::rk4_raw(s, u, dt, p);
  n.load_cam = recompute_load_cam(n, p);
  if (!n.finite()) throw NumericError("rk4_step_fixed_mode: non-finite state");
  return n;
}

/// Event-aware simulator step. Taut mode applies constraint stabilization
/// (cable length and tangential relative velocity re-projected); a negative
/// tension releases the constraint before integrating; slack→taut crossings
/// are located by bisection to 1e-9 s and resolved with the inelastic impact
/// map before integrating the remainder of the step.
inline SystemState rk4_step(const SystemState& s0, const ControlInput& u,
                            double dt, const VehicleParams& p,
                            const ExternalWrench& w = {}) {
  if (!(dt > 0.0)) throw ContractViolation("rk4_step: dt must be > 0");
  constexpr double kTimeTol = 1e-9;

  SystemState s = s0;
  double remaining = dt;
  int guard = 0;
  while (remaining > kTimeTol) {
    if (++guard > 8) {
      // Chattering guard: finish the step in the current mode.
      s = detail::rk4_raw(s, u, remaining, p, w);
      if (s.mode == 1) s = project_taut_constraint(s, p);
      s.load_cam = recompute_load_cam(s, p);
      break;
    }
    if (s.mode == 1) {
      bool clamped = false;
      tension(s, u.thrust, p, w, &clamped);
      if (clamped) {
        // Cable cannot push: release the constraint and fall through to the
        // slack branch on this same step.
        s.mode = 0;
        continue;
      }
      SystemState n = detail::rk4_raw(s, u, remaining, p, w);
      n = project_taut_constraint(n, p);
      n.load_cam = recompute_load_cam(n, p);
      s = n;
      remaining = 0.0;
    } else {
      SystemState n = detail::rk4_raw(s, u, remaining, p, w);
      const double dist = (n.load_pos - n.quad_pos).norm();
      if (dist < p.cable_length) {
        n.load_cam = recompute_load_cam(n, p);
        s = n;
        remaining = 0.0;
      } else {
        // Bisect the crossing time of ‖x_L − x_Q‖ = l.
        double lo = 0.0, hi = remaining;
        while (hi - lo > kTimeTol) {
          const double mid = 0.5 * (lo + hi);
          const SystemState m = detail::rk4_raw(s, u, mid, p, w);
          ((m.load_pos - m.quad_pos).norm() < p.cable_length ? lo : hi) = mid;
        }
        SystemState at_impact = detail::rk4_raw(s, u, hi, p, w);
        at_impact = apply_taut_impact(at_impact, p);
        at_impact.load_cam = recompute_load_cam(at_impact, p);
        s = at_impact;
        remaining -= hi;
      }
    }
  }
  if (!s.finite()) throw NumericError("rk4_step: non-finite state");
  return s;
}

/// Kinetic + gravitational potential energy of both bodies plus rotational
/// kinetic energy of the quadrotor.
inline double mechanical_energy(const SystemState& s, const VehicleParams& p) {
  const double t_quad = 0.5 * p.mass_quad * s.quad_vel.squaredNorm();
  const double t_load = 0.5 * p.mass_load * s.load_vel.squaredNorm();
  const double t_rot = 0.5 * s.body_rate.dot(p.inertia * s.body_rate);
  const double v_quad = p.mass_quad * p.gravity * s.quad_pos.z();
  const double v_load = p.mass_load * p.gravity * s.load_pos.z();
  return t_quad + t_load + t_rot + v_quad + v_load;
}

/// Canonical taut hover state: payload hanging straight below the quadrotor.
inline SystemState hover_state(const Vec3& quad_pos, const VehicleParams& p) {
  SystemState s;
  s.quad_pos = quad_pos;
  s.load_pos = quad_pos - Vec3(0, 0, p.cable_length);
  s.mode = 1;
  s.load_cam = recompute_load_cam(s, p);
  return s;
}

inline ControlInput hover_input(const VehicleParams& p, int mode = 1) {
  ControlInput u;
  u.thrust = (p.mass_quad + (mode == 1 ? p.mass_load : 0.0)) * p.gravity;
  return u;
}

}  // namespace eshpc

#endif  // ESHPC_DYNAMICS_HPP_
