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

#ifndef ESHPC_BARRIER_HPP_
#define ESHPC_BARRIER_HPP_

#include "eshpc/core.hpp"
#include "eshpc/dynamics.hpp"

namespace eshpc {

/// Field-of-view safety set: h(x) = r_max² − ‖x_CL‖²_K ≥ 0 keeps the payload
/// inside an ellipsoid around the camera axis. The default shape inscribes a
/// 90°×53° view cone at unit depth (1280×720-style optics) with a weak depth
/// weight.
struct FovSpec {
  Mat3 shape = (Eigen::Vector3d(1.0, 4.0, 0.25)).asDiagonal();  // K, 1/m²
  double r_max = 1.0;
  double alpha = 2.0;  // 1/s, linear class-K rate

  // Optional motion-aligned reshaping of K: the in-image long axis rotates
  // toward the camera-frame direction of the horizontal reference
  // acceleration, blended by ‖a_ref‖/accel_scale clamped to [0,1].
  bool dynamic_shape = false;
  double accel_scale = 6.0;  // m/s²

  void validate() const {
    if (!is_positive_definite(shape))
      throw ContractViolation("fov: shape matrix K must be symmetric positive definite");
    if (!(r_max > 0.0)) throw ContractViolation("fov: r_max must be > 0");
    if (!(alpha > 0.0)) throw ContractViolation("fov: alpha must be > 0");
    if (!(accel_scale > 0.0)) throw ContractViolation("fov: accel_scale must be > 0");
  }

  /// Effective K for a given world-frame reference acceleration. Identity of
  /// the nominal shape when disabled or when the reference is not
  /// accelerating horizontally.
  Mat3 effective_shape(const Vec3& accel_ref_world, const SystemState& s,
                       const VehicleParams& p) const {
    if (!dynamic_shape) return shape;
    Vec3 a = accel_ref_world;
    a.z() = 0.0;
    const double mag = a.norm();
    if (mag < 1e-9) return shape;
    const double wgt = std::min(1.0, mag / accel_scale);

    // Direction of motion in the camera image plane.
    const Mat3 r_cw = quat_to_rot(p.cam_mount).transpose() *
                      quat_to_rot(s.attitude).transpose();
    Vec3 dir_cam = r_cw * (a / mag);
    dir_cam.z() = 0.0;
    const double n = dir_cam.norm();
    if (n < 1e-9) return shape;
    dir_cam /= n;

    // Long (loose) in-image axis of the nominal ellipse aligned with
    // dir_cam. Nominal K is camera-axis aligned.
    const double k_loose = std::min(shape(0, 0), shape(1, 1));
    const double k_tight = std::max(shape(0, 0), shape(1, 1));
    const double kz = shape(2, 2);
    const Vec3 ortho(-dir_cam.y(), dir_cam.x(), 0.0);
    Mat3 aligned = k_loose * dir_cam * dir_cam.transpose() +
                   k_tight * ortho * ortho.transpose() +
                   kz * Vec3::UnitZ() * Vec3::UnitZ().transpose();
    return (1.0 - wgt) * shape + wgt * aligned;
  }
};

/// h(x) = r_max² − x_CLᵀ K x_CL.
inline double barrier_value(const Vec3& load_cam, const FovSpec& fov) {
  return fov.r_max * fov.r_max - load_cam.dot(fov.shape * load_cam);
}

/// ḣ = −2(K x_CL)·ẋ_CL with ẋ_CL from the camera-frame kinematics. The input
/// enters only through the chained dynamics; on its own this expression is a
/// function of the state.
inline double barrier_derivative(const SystemState& s, const ControlInput& u,
                                 const VehicleParams& p, const FovSpec& fov) {
  const StateDerivative d = state_derivative(s, u, p);
  return -2.0 * (fov.shape * s.load_cam).dot(d.load_cam_rate);
}

/// g_cbf = ḣ + α·h; the safety condition holds iff this is ≥ 0.
inline double cbf_constraint_residual(const SystemState& s,
                                      const ControlInput& u,
                                      const VehicleParams& p,
                                      const FovSpec& fov) {
  return barrier_derivative(s, u, p, fov) +
         fov.alpha * barrier_value(s.load_cam, fov);
}

}  // namespace eshpc

#endif  // ESHPC_BARRIER_HPP_
