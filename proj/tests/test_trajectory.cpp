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

#include "eshpc/trajectory.hpp"

#include <gtest/gtest.h>

namespace eshpc {
namespace {

TEST(EvalFlat, HoverIsConstant) {
  TrajectorySpec spec;
  spec.kind = TrajectoryKind::Hover;
  spec.start = Vec3(1, 2, 3);
  for (double t : {0.0, 1.0, 5.0}) {
    const FlatOutputs f = eval_flat(spec, t);
    EXPECT_EQ(f.pos, Vec3(1, 2, 3));
    EXPECT_EQ(f.vel.norm(), 0.0);
    EXPECT_EQ(f.acc.norm(), 0.0);
  }
}

// Closed-form minimum-jerk peak speed is (15/8)·d/T, reached at mid-stroke.
TEST(EvalFlat, MinimumJerkPeakSpeed) {
  TrajectorySpec spec;
  spec.kind = TrajectoryKind::PointToPoint;
  spec.displacement = Vec3(1.5, 0, 0);
  spec.duration = 1.5;
  const double expect = 15.0 / 8.0 * 1.5 / 1.5;  // 1.875 m/s
  EXPECT_NEAR(eval_flat(spec, 0.75).vel.norm(), expect, 1e-12);
  EXPECT_NEAR(peak_reference_speed(spec), expect, 1e-6);
}

TEST(EvalFlat, MinimumJerkEndpointsAtRest) {
  TrajectorySpec spec;
  spec.kind = TrajectoryKind::PointToPoint;
  spec.start = Vec3(0, 0, 1);
  spec.displacement = Vec3(1.5, -0.5, 0.2);
  spec.duration = 2.0;
  const FlatOutputs f0 = eval_flat(spec, 0.0);
  const FlatOutputs f1 = eval_flat(spec, 2.0);
  EXPECT_NEAR((f0.pos - spec.start).norm(), 0.0, 1e-14);
  EXPECT_NEAR((f1.pos - spec.start - spec.displacement).norm(), 0.0, 1e-12);
  EXPECT_NEAR(f0.vel.norm() + f1.vel.norm(), 0.0, 1e-12);
  EXPECT_NEAR(f0.acc.norm() + f1.acc.norm(), 0.0, 1e-12);
}

TEST(EvalFlat, LineReachesDisplacementWithCruise) {
  TrajectorySpec spec;
  spec.kind = TrajectoryKind::Line;
  spec.start = Vec3(0, 0, 1);
  spec.displacement = Vec3(4.0, 0, 0);
  spec.duration = 5.0;
  spec.ramp_time = 1.0;
  const FlatOutputs mid = eval_flat(spec, 2.5);
  const Vec3 v_c = spec.displacement / (spec.duration - spec.ramp_time);
  EXPECT_NEAR((mid.vel - v_c).norm(), 0.0, 1e-12);  // cruising
  EXPECT_NEAR(mid.acc.norm(), 0.0, 1e-12);
  const FlatOutputs end = eval_flat(spec, 5.0);
  EXPECT_NEAR((end.pos - Vec3(4.0, 0, 1)).norm(), 0.0, 1e-10);
  EXPECT_NEAR(end.vel.norm(), 0.0, 1e-12);
}

TEST(EvalFlat, ClampsOutsideDurationWithFlag) {
  TrajectorySpec spec;
  spec.kind = TrajectoryKind::PointToPoint;
  spec.duration = 1.0;
  const FlatOutputs f = eval_flat(spec, 2.0);
  EXPECT_TRUE(f.clamped);
  EXPECT_NEAR((f.pos - (spec.start + spec.displacement)).norm(), 0.0, 1e-12);
  EXPECT_EQ(f.vel.norm(), 0.0);
  EXPECT_FALSE(eval_flat(spec, 0.5).clamped);
}

// Central-difference consistency of the analytic derivative chain,
// position → velocity → acceleration, for every kind.
TEST(EvalFlat, DerivativeChainConsistency) {
  std::vector<TrajectorySpec> specs(3);
  specs[0].kind = TrajectoryKind::PointToPoint;
  specs[0].duration = 2.0;
  specs[1].kind = TrajectoryKind::Line;
  specs[1].duration = 5.0;
  specs[1].ramp_time = 1.2;
  specs[2] = make_seeded_lissajous(7, 2.0);
  const double h = 1e-6;
  for (const auto& spec : specs) {
    for (double frac : {0.11, 0.37, 0.52, 0.83}) {
      const double t = frac * spec.duration;
      const FlatOutputs f = eval_flat(spec, t);
      const FlatOutputs fp = eval_flat(spec, t + h);
      const FlatOutputs fm = eval_flat(spec, t - h);
      EXPECT_NEAR(((fp.pos - fm.pos) / (2 * h) - f.vel).norm(), 0.0, 1e-6);
      EXPECT_NEAR(((fp.vel - fm.vel) / (2 * h) - f.acc).norm(), 0.0, 1e-6);
      EXPECT_NEAR(((fp.acc - fm.acc) / (2 * h) - f.jerk).norm(), 0.0, 1e-4);
    }
  }
}

TEST(Lissajous, SeededFamilyHitsPeakSpeedTarget) {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 17ULL}) {
    for (double target : {1.5, 2.4, 3.5}) {
      const TrajectorySpec spec = make_seeded_lissajous(seed, target);
      EXPECT_NEAR(peak_reference_speed(spec), target, 0.01 * target)
          << "seed " << seed << " target " << target;
    }
  }
}

TEST(Lissajous, StartsAtRestOnCenter) {
  const TrajectorySpec spec = make_seeded_lissajous(5, 2.0);
  const FlatOutputs f0 = eval_flat(spec, 0.0);
  EXPECT_NEAR((f0.pos - spec.start).norm(), 0.0, 1e-12);
  EXPECT_NEAR(f0.vel.norm(), 0.0, 1e-12);
  EXPECT_NEAR(f0.acc.norm(), 0.0, 1e-12);
}

TEST(GenerateReference, HoverReference) {
  const VehicleParams p;
  TrajectorySpec spec;
  spec.kind = TrajectoryKind::Hover;
  spec.start = Vec3(0, 0, 1);
  const auto [ref, rates] = generate_reference(spec, 3.0, p);
  EXPECT_NEAR((ref.load_pos - Vec3(0, 0, 1)).norm(), 0.0, 1e-14);
  EXPECT_NEAR((ref.quad_pos - Vec3(0, 0, 1 + p.cable_length)).norm(), 0.0, 1e-14);
  EXPECT_NEAR(ref.quad_vel.norm(), 0.0, 0.0);
  // level attitude, zero rates
  EXPECT_NEAR((quat_to_rot(ref.attitude) - Mat3::Identity()).norm(), 0.0, 1e-12);
  EXPECT_NEAR(ref.body_rate.norm(), 0.0, 1e-12);
  EXPECT_NEAR(rates.body_rate_dot.norm(), 0.0, 1e-9);
}

// The flatness attitude must reproduce the commanded acceleration direction:
// R·z ∝ (a_ref + g·z).
TEST(GenerateReference, FlatnessThrustAxis) {
  const VehicleParams p;
  const TrajectorySpec spec = make_seeded_lissajous(11, 2.5);
  for (double t : {1.0, 2.7, 4.2, 6.9}) {
    const auto [ref, rates] = generate_reference(spec, t, p);
    const Vec3 v = ref.quad_acc + Vec3(0, 0, p.gravity);
    const Vec3 b3 = quat_to_rot(ref.attitude).col(2);
    EXPECT_NEAR((b3 - v.normalized()).norm(), 0.0, 1e-10) << "t " << t;
  }
}

// ω_ref consistency: numerically differentiate the reference attitude and
// compare with the reported body rate (on-manifold central difference).
TEST(GenerateReference, BodyRateMatchesAttitudeDerivative) {
  const VehicleParams p;
  const TrajectorySpec spec = make_seeded_lissajous(13, 2.0);
  const double h = 1e-6;
  for (double t : {1.3, 3.1, 5.5}) {
    const auto [ref, rates] = generate_reference(spec, t, p);
    const auto [refp, rp] = generate_reference(spec, t + h, p);
    const auto [refm, rm] = generate_reference(spec, t - h, p);
    // body-frame rate: ω = log(q(t)⁻¹ ⊗ q(t+h)) − log(q(t)⁻¹ ⊗ q(t−h)) over 2h
    const Vec3 fwd = quat_log(ref.attitude.conjugate() * refp.attitude);
    const Vec3 bwd = quat_log(ref.attitude.conjugate() * refm.attitude);
    const Vec3 omega_fd = (fwd - bwd) / (2 * h);
    EXPECT_NEAR((omega_fd - ref.body_rate).norm(), 0.0, 1e-5) << "t " << t;
    // and ω̇_ref against the same stencil on ω itself
    const Vec3 omega_dot_fd = (refp.body_rate - refm.body_rate) / (2 * h);
    EXPECT_NEAR((omega_dot_fd - rates.body_rate_dot).norm(), 0.0,
                2e-4 * std::max(1.0, rates.body_rate_dot.norm()))
        << "t " << t;
  }
}

TEST(FeedforwardInput, HoverThrust) {
  const VehicleParams p;
  TrajectorySpec spec;
  spec.kind = TrajectoryKind::Hover;
  const auto [ref, rates] = generate_reference(spec, 0.0, p);
  const ControlInput u = feedforward_input(ref, rates, p, 1);
  EXPECT_NEAR(u.thrust, (p.mass_quad + p.mass_load) * p.gravity, 1e-9);
  EXPECT_NEAR(u.torque.norm(), 0.0, 1e-9);
  const ControlInput u_slack = feedforward_input(ref, rates, p, 0);
  EXPECT_NEAR(u_slack.thrust, p.mass_quad * p.gravity, 1e-9);
}

TEST(TrajectorySpec, ValidationRejectsBadSpecs) {
  TrajectorySpec spec;
  spec.duration = 0.0;
  EXPECT_THROW(spec.validate(), ContractViolation);
  spec = TrajectorySpec{};
  spec.kind = TrajectoryKind::Line;
  spec.duration = 1.0;
  spec.ramp_time = 0.8;  // 2·ramp > duration
  EXPECT_THROW(spec.validate(), ContractViolation);
}

}  // namespace
}  // namespace eshpc
