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

#ifndef ESHPC_PARAMS_HPP_
#define ESHPC_PARAMS_HPP_

#include "eshpc/core.hpp"

namespace eshpc {

/// Physical parameters of the quadrotor + cable-suspended payload rig.
/// Defaults are a desk-scale configuration.
struct VehicleParams {
  double mass_quad = 1.0;    // kg
  double mass_load = 0.2;    // kg
  double cable_length = 1.0; // m
  double gravity = 9.81;     // m/s^2
  Mat3 inertia = (Eigen::Vector3d(0.01, 0.01, 0.02)).asDiagonal();

  // Camera rigidly mounted on the body, optical axis (+z_C) pointing down:
  // 180 deg rotation about body x.
  Vec3 cam_offset = Vec3::Zero();                  // x_QC, m
  UnitQuaternion cam_mount{0.0, 1.0, 0.0, 0.0};    // q_QC

  double mode_margin = 0.05;  // ε, m; slack declared below l − ε

  // Actuator envelope.
  double thrust_max = 4.0 * (1.0 + 0.2) * 9.81;  // N
  double torque_max = 0.5;                       // N·m, per axis

  double min_inertia_eigenvalue() const { return min_eigenvalue(inertia); }
  double max_inertia_eigenvalue() const { return max_eigenvalue(inertia); }

  void validate() const {
    if (!(mass_quad > 0.0)) throw ContractViolation("vehicle: mass_quad must be > 0");
    if (!(mass_load > 0.0)) throw ContractViolation("vehicle: mass_load must be > 0");
    if (!(cable_length > 0.0)) throw ContractViolation("vehicle: cable_length must be > 0");
    if (!(gravity > 0.0)) throw ContractViolation("vehicle: gravity must be > 0");
    if (!is_positive_definite(inertia))
      throw ContractViolation("vehicle: inertia must be symmetric positive definite");
    if (!(mode_margin > 0.0 && mode_margin < cable_length))
      throw ContractViolation("vehicle: mode_margin must lie in (0, cable_length)");
    if (!(thrust_max > 0.0)) throw ContractViolation("vehicle: thrust_max must be > 0");
    if (!(torque_max > 0.0)) throw ContractViolation("vehicle: torque_max must be > 0");
    if (std::abs(cam_mount.norm() - 1.0) > 1e-9)
      throw ContractViolation("vehicle: cam_mount quaternion must be unit norm");
  }
};

}  // namespace eshpc

#endif  // ESHPC_PARAMS_HPP_
