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

#ifndef ESHPC_TRAJECTORY_HPP_
#define ESHPC_TRAJECTORY_HPP_

#include <cstdint>
#include <random>
#include <utility>

#include "eshpc/certificates.hpp"
#include "eshpc/core.hpp"
#include "eshpc/params.hpp"

namespace eshpc {

enum class TrajectoryKind { Hover, Line, PointToPoint, Lissajous };
enum class YawPolicy { FixedZero, FollowVelocity };

/// Payload-centric reference family. All kinds have analytic derivatives
/// through jerk.
struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::Hover;
  Vec3 start = Vec3(0.0, 0.0, 1.0);  // initial payload position
  double duration = 10.0;            // s

  // Line / PointToPoint.
  Vec3 displacement = Vec3(1.5, 0.0, 0.0);
  double ramp_time = 1.0;  // Line: min-jerk speed ramp at both ends

  // Lissajous: x = A ∘ sin(ω t + φ) about `start`, scaled by a min-jerk
  // startup envelope over `ramp_time`.
  Vec3 amplitudes = Vec3(1.2, 0.8, 0.2);
  Vec3 frequencies = Vec3(1.0, 2.0, 2.0);  // rad/s
  Vec3 phases = Vec3(0.0, 0.0, 0.0);

  YawPolicy yaw_policy = YawPolicy::FixedZero;

  void validate() const {
    if (!(duration > 0.0)) throw ContractViolation("trajectory: duration must be > 0");
    if (kind == TrajectoryKind::Line || kind == TrajectoryKind::Lissajous)
      if (!(ramp_time > 0.0) || ramp_time * 2.0 > duration)
        throw ContractViolation("trajectory: ramp_time must be in (0, duration/2]");
  }
};

/// Position derivatives of the payload reference at one instant.
struct FlatOutputs {
  Vec3 pos = Vec3::Zero();
  Vec3 vel = Vec3::Zero();
  Vec3 acc = Vec3::Zero();
  Vec3 jerk = Vec3::Zero();
  bool clamped = false;  // t was outside [0, duration]
};

namespace detail {

// Minimum-jerk unit profile and derivatives on τ ∈ [0, 1].
inline void min_jerk(double tau, double& s, double& ds, double& dds,
                     double& ddds) {
  const double t2 = tau * tau, t3 = t2 * tau, t4 = t3 * tau, t5 = t4 * tau;
  s = 10 * t3 - 15 * t4 + 6 * t5;
  ds = 30 * t2 - 60 * t3 + 30 * t4;
  dds = 60 * tau - 180 * t2 + 120 * t3;
  ddds = 60 - 360 * tau + 360 * t2;
}

}  // namespace detail

inline FlatOutputs eval_flat(const TrajectorySpec& spec, double t) {
  FlatOutputs f;
  double tc = t;
  if (tc < 0.0) { tc = 0.0; f.clamped = true; }
  if (tc > spec.duration) { tc = spec.duration; f.clamped = true; }

  switch (spec.kind) {
    case TrajectoryKind::Hover: {
      f.pos = spec.start;
      break;
    }
    case TrajectoryKind::PointToPoint: {
      double s, ds, dds, ddds;
      const double T = spec.duration;
      detail::min_jerk(tc / T, s, ds, dds, ddds);
      f.pos = spec.start + s * spec.displacement;
      f.vel = (ds / T) * spec.displacement;
      f.acc = (dds / (T * T)) * spec.displacement;
      f.jerk = (ddds / (T * T * T)) * spec.displacement;
      break;
    }
    case TrajectoryKind::Line: {
      // Constant-speed cruise with min-jerk velocity ramps at both ends:
      // velocity is v(t) = v_c · e(t) with e ramping 0→1→0, position its
      // integral. ∫ e over the whole profile is T − tr, which fixes v_c.
      const double T = spec.duration, tr = spec.ramp_time;
      const Vec3 v_c = spec.displacement / (T - tr);
      // ∫₀^τ of the min-jerk polynomial.
      auto ramp_integral = [](double tau) {
        return 2.5 * std::pow(tau, 4) - 3.0 * std::pow(tau, 5) + std::pow(tau, 6);
      };
      double e, de, dde, pos_int;
      if (tc < tr) {
        double s, ds, dds, ddds;
        detail::min_jerk(tc / tr, s, ds, dds, ddds);
        e = s;
        de = ds / tr;
        dde = dds / (tr * tr);
        pos_int = tr * ramp_integral(tc / tr);
      } else if (tc <= T - tr) {
        e = 1.0;
        de = 0.0;
        dde = 0.0;
        pos_int = 0.5 * tr + (tc - tr);
      } else {
        const double tau = (T - tc) / tr;  // mirrored ramp, τ: 1 → 0
        double s, ds, dds, ddds;
        detail::min_jerk(tau, s, ds, dds, ddds);
        e = s;
        de = -ds / tr;
        dde = dds / (tr * tr);
        pos_int = (T - tr) - tr * ramp_integral(tau);
      }
      f.pos = spec.start + pos_int * v_c;
      f.vel = e * v_c;
      f.acc = de * v_c;
      f.jerk = dde * v_c;
      break;
    }
    case TrajectoryKind::Lissajous: {
      Vec3 p, v, a, j;
      const Vec3 p0 = spec.amplitudes.array() * spec.phases.array().sin();
      for (int i = 0; i < 3; ++i) {
        const double w = spec.frequencies(i), ph = spec.phases(i);
        const double arg = w * tc + ph;
        p(i) = spec.amplitudes(i) * std::sin(arg) - p0(i);
        v(i) = spec.amplitudes(i) * w * std::cos(arg);
        a(i) = -spec.amplitudes(i) * w * w * std::sin(arg);
        j(i) = -spec.amplitudes(i) * w * w * w * std::cos(arg);
      }
      // Min-jerk startup envelope so the run begins at rest on the pattern.
      double e = 1.0, de = 0.0, dde = 0.0, ddde = 0.0;
      if (tc < spec.ramp_time) {
        double s, ds, dds, ddds;
        detail::min_jerk(tc / spec.ramp_time, s, ds, dds, ddds);
        const double tr = spec.ramp_time;
        e = s; de = ds / tr; dde = dds / (tr * tr); ddde = ddds / (tr * tr * tr);
      }
      f.pos = spec.start + e * p;
      f.vel = e * v + de * p;
      f.acc = e * a + 2.0 * de * v + dde * p;
      f.jerk = e * j + 3.0 * de * a + 3.0 * dde * v + ddde * p;
      break;
    }
  }
  if (f.clamped) {  // hold the endpoint at rest
    f.vel.setZero();
    f.acc.setZero();
    f.jerk.setZero();
  }
  return f;
}

namespace detail {

struct AttitudeRef {
  UnitQuaternion q;
  Vec3 omega;
};

/// Flatness attitude from commanded acceleration: thrust axis
/// b3 = (a + g z)/‖·‖, yaw per policy; ω from the jerk.
inline AttitudeRef flat_attitude(const Vec3& acc, const Vec3& jerk,
                                 const Vec3& vel, YawPolicy yaw, double g) {
  const Vec3 v = acc + Vec3(0.0, 0.0, g);
  const double n = v.norm();
  if (n < 1e-9) throw NumericError("flat_attitude: free-fall reference has no thrust axis");
  const Vec3 b3 = v / n;
  const Vec3 b3_dot = (Mat3::Identity() - b3 * b3.transpose()) * jerk / n;

  double psi = 0.0, psi_dot = 0.0;
  if (yaw == YawPolicy::FollowVelocity) {
    const double vxy2 = vel.x() * vel.x() + vel.y() * vel.y();
    if (vxy2 > 0.25) {  // only meaningful above 0.5 m/s
      psi = std::atan2(vel.y(), vel.x());
      psi_dot = (vel.x() * acc.y() - vel.y() * acc.x()) / vxy2;
    }
  }
  const Vec3 b1c(std::cos(psi), std::sin(psi), 0.0);
  const Vec3 b1c_dot = psi_dot * Vec3(-std::sin(psi), std::cos(psi), 0.0);

  Vec3 w = b3.cross(b1c);
  const double wn = w.norm();
  if (wn < 1e-9) throw NumericError("flat_attitude: thrust axis parallel to yaw direction");
  const Vec3 w_dot_raw = b3_dot.cross(b1c) + b3.cross(b1c_dot);
  const Vec3 b2 = w / wn;
  const Vec3 b2_dot = (Mat3::Identity() - b2 * b2.transpose()) * w_dot_raw / wn;
  const Vec3 b1 = b2.cross(b3);
  const Vec3 b1_dot = b2_dot.cross(b3) + b2.cross(b3_dot);

  Mat3 r;
  r.col(0) = b1;
  r.col(1) = b2;
  r.col(2) = b3;
  Mat3 r_dot;
  r_dot.col(0) = b1_dot;
  r_dot.col(1) = b2_dot;
  r_dot.col(2) = b3_dot;

  AttitudeRef out;
  out.omega = vee(r.transpose() * r_dot);

  // Rotation matrix → quaternion (Shepperd), w ≥ 0 branch.
  const double tr = r.trace();
  double qw, qx, qy, qz;
  if (tr > 0.0) {
    const double s = std::sqrt(tr + 1.0) * 2.0;
    qw = 0.25 * s;
    qx = (r(2, 1) - r(1, 2)) / s;
    qy = (r(0, 2) - r(2, 0)) / s;
    qz = (r(1, 0) - r(0, 1)) / s;
  } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
    const double s = std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2)) * 2.0;
    qw = (r(2, 1) - r(1, 2)) / s;
    qx = 0.25 * s;
    qy = (r(0, 1) + r(1, 0)) / s;
    qz = (r(0, 2) + r(2, 0)) / s;
  } else if (r(1, 1) > r(2, 2)) {
    const double s = std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2)) * 2.0;
    qw = (r(0, 2) - r(2, 0)) / s;
    qx = (r(0, 1) + r(1, 0)) / s;
    qy = 0.25 * s;
    qz = (r(1, 2) + r(2, 1)) / s;
  } else {
    const double s = std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1)) * 2.0;
    qw = (r(1, 0) - r(0, 1)) / s;
    qx = (r(0, 2) + r(2, 0)) / s;
    qy = (r(1, 2) + r(2, 1)) / s;
    qz = 0.25 * s;
  }
  out.q = UnitQuaternion::from_wxyz(qw, qx, qy, qz);
  if (out.q.w < 0.0) out.q = {-out.q.w, -out.q.x, -out.q.y, -out.q.z};
  return out;
}

}  // namespace detail

/// Reference point + rates at time t. The quadrotor tracks directly above the
/// payload (taut-hang offset l·z); ω̇_ref comes from a central difference of
/// the smooth closed-form ω_ref(t).
inline std::pair<ReferencePoint, ReferenceRates> generate_reference(
    const TrajectorySpec& spec, double t, const VehicleParams& p) {
  const FlatOutputs f = eval_flat(spec, t);
  ReferencePoint ref;
  ref.load_pos = f.pos;
  ref.load_vel = f.vel;
  ref.quad_pos = f.pos + Vec3(0.0, 0.0, p.cable_length);
  ref.quad_vel = f.vel;
  ref.quad_acc = f.acc;

  const auto att = detail::flat_attitude(f.acc, f.jerk, f.vel,
                                         spec.yaw_policy, p.gravity);
  ref.attitude = att.q;
  ref.body_rate = att.omega;

  ReferenceRates rates;
  rates.load_acc = f.acc;
  const double h = 1e-5;
  const FlatOutputs fp = eval_flat(spec, t + h);
  const FlatOutputs fm = eval_flat(spec, t - h);
  const auto att_p = detail::flat_attitude(fp.acc, fp.jerk, fp.vel,
                                           spec.yaw_policy, p.gravity);
  const auto att_m = detail::flat_attitude(fm.acc, fm.jerk, fm.vel,
                                           spec.yaw_policy, p.gravity);
  rates.body_rate_dot = (att_p.omega - att_m.omega) / (2.0 * h);
  return {ref, rates};
}

/// Flatness feed-forward input for the reference at time t.
inline ControlInput feedforward_input(const ReferencePoint& ref,
                                      const ReferenceRates& rates,
                                      const VehicleParams& p, int mode) {
  ControlInput u;
  const Vec3 v = ref.quad_acc + Vec3(0.0, 0.0, p.gravity);
  const double m_tot = p.mass_quad + (mode == 1 ? p.mass_load : 0.0);
  u.thrust = m_tot * v.norm();
  u.torque = p.inertia * rates.body_rate_dot +
             ref.body_rate.cross(p.inertia * ref.body_rate);
  return u.clamped(p);
}

/// Max ‖v_ref‖ over a dense sampling of [0, duration].
inline double peak_reference_speed(const TrajectorySpec& spec,
                                   int samples = 4000) {
  double peak = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double t = spec.duration * i / samples;
    peak = std::max(peak, eval_flat(spec, t).vel.norm());
  }
  return peak;
}

/// Seeded Lissajous family member with amplitudes scaled to hit a peak-speed
/// target exactly (speed scales linearly with the base frequency for fixed
/// shape, so the scaling is solved numerically once).
inline TrajectorySpec make_seeded_lissajous(std::uint64_t seed,
                                            double peak_speed,
                                            double duration = 8.0,
                                            const Vec3& center = Vec3(0, 0, 1)) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  TrajectorySpec spec;
  spec.kind = TrajectoryKind::Lissajous;
  spec.start = center;
  spec.duration = duration;
  spec.ramp_time = 1.5;
  spec.amplitudes = Vec3(1.0 + 0.5 * u01(rng), 0.6 + 0.4 * u01(rng),
                         0.1 + 0.15 * u01(rng));
  const double base = 0.8 + 0.4 * u01(rng);
  const double ratio = u01(rng) < 0.5 ? 2.0 : 1.5;
  spec.frequencies = Vec3(base, ratio * base, 2.0 * base);
  spec.phases = Vec3(0.0, 2.0 * M_PI * u01(rng), 2.0 * M_PI * u01(rng));

  // Scale the base frequency until the dense-sampled peak speed hits the
  // target (the startup envelope makes the map slightly nonlinear, so
  // fixed-point iterate).
  for (int it = 0; it < 25; ++it) {
    const double got = peak_reference_speed(spec);
    if (got < 1e-9) break;
    if (std::abs(got - peak_speed) < 2e-3 * peak_speed) break;
    spec.frequencies *= peak_speed / got;
  }
  return spec;
}

}  // namespace eshpc

#endif  // ESHPC_TRAJECTORY_HPP_
