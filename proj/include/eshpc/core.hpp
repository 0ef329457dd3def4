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

#ifndef ESHPC_CORE_HPP_
#define ESHPC_CORE_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace eshpc {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Thrown when a caller breaks a documented precondition.
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

/// Thrown when a computation produces non-finite values.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when a configured gain set fails one of the certificate
/// inequalities; the message names the violated condition.
struct GainValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

inline Vec3 vee(const Mat3& m) { return Vec3(m(2, 1), m(0, 2), m(1, 0)); }

/// Scalar-first Hamilton-convention unit quaternion. Stores q_WQ style
/// orientations (frame Q expressed in frame W); rotate() maps body-frame
/// vectors into the parent frame.
struct UnitQuaternion {
  double w{1.0}, x{0.0}, y{0.0}, z{0.0};

  static UnitQuaternion identity() { return {}; }

  static UnitQuaternion from_wxyz(double w, double x, double y, double z) {
    UnitQuaternion q{w, x, y, z};
    return q.normalized();
  }

  static UnitQuaternion from_axis_angle(const Vec3& axis, double angle) {
    const double n = axis.norm();
    if (n == 0.0) return identity();
    const Vec3 a = axis / n;
    const double h = 0.5 * angle;
    return {std::cos(h), a.x() * std::sin(h), a.y() * std::sin(h),
            a.z() * std::sin(h)};
  }

  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

  UnitQuaternion normalized() const {
    const double n = norm();
    if (n == 0.0) throw NumericError("cannot normalize zero quaternion");
    return {w / n, x / n, y / n, z / n};
  }

  UnitQuaternion conjugate() const { return {w, -x, -y, -z}; }

  Vec4 as_vec() const { return Vec4(w, x, y, z); }

  /// Hamilton product, this ⊗ rhs.
  UnitQuaternion operator*(const UnitQuaternion& r) const {
    return {w * r.w - x * r.x - y * r.y - z * r.z,
            w * r.x + x * r.w + y * r.z - z * r.y,
            w * r.y - x * r.z + y * r.w + z * r.x,
            w * r.z + x * r.y - y * r.x + z * r.w};
  }

  /// Sandwich product q ⊗ (0,v) ⊗ q⁻¹.
  Vec3 rotate(const Vec3& v) const {
    const Vec3 u(x, y, z);
    return v + 2.0 * u.cross(u.cross(v) + w * v);
  }
};

inline Mat3 quat_to_rot(const UnitQuaternion& q) {
  const double w = q.w, x = q.x, y = q.y, z = q.z;
  Mat3 r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

/// Body-rate quaternion kinematics, dq/dt = ½ q ⊗ (0, ω).
inline Vec4 quat_kinematics(const UnitQuaternion& q, const Vec3& omega) {
  const UnitQuaternion rate{0.0, omega.x(), omega.y(), omega.z()};
  const UnitQuaternion d = q * rate;
  return 0.5 * d.as_vec();
}

/// Exponential-map step: q ⊗ exp(½ ω dt). Exact for constant body rate.
inline UnitQuaternion integrate_quat(const UnitQuaternion& q,
                                     const Vec3& omega, double dt) {
  const double angle = omega.norm() * dt;
  if (angle < 1e-14) {
    const Vec4 qd = q.as_vec() + dt * quat_kinematics(q, omega);
    return UnitQuaternion::from_wxyz(qd(0), qd(1), qd(2), qd(3));
  }
  const UnitQuaternion step =
      UnitQuaternion::from_axis_angle(omega / omega.norm(), angle);
  return (q * step).normalized();
}

/// Rotation-vector log of a unit quaternion (angle-axis, angle in [0, π]).
inline Vec3 quat_log(const UnitQuaternion& q_in) {
  UnitQuaternion q = q_in;
  if (q.w < 0.0) q = {-q.w, -q.x, -q.y, -q.z};
  const Vec3 v(q.x, q.y, q.z);
  const double vn = v.norm();
  if (vn < 1e-12) return 2.0 * v;
  const double angle = 2.0 * std::atan2(vn, q.w);
  return (angle / vn) * v;
}

inline UnitQuaternion quat_exp(const Vec3& phi) {
  return UnitQuaternion::from_axis_angle(phi, phi.norm());
}

/// vᵀ M v for a positive definite weight M.
inline double weighted_norm_sq(const Eigen::VectorXd& v,
                               const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() != v.size())
    throw ContractViolation("weighted_norm_sq: dimension mismatch (" +
                            std::to_string(v.size()) + " vs " +
                            std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()) + ")");
  return v.dot(m * v);
}

inline double min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  return es.eigenvalues().minCoeff();
}

inline double max_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  return es.eigenvalues().maxCoeff();
}

inline bool is_positive_definite(const Eigen::MatrixXd& m,
                                 double tol = 1e-10) {
  if (m.rows() != m.cols()) return false;
  if (!m.isApprox(m.transpose(), 1e-9)) return false;
  return min_eigenvalue(m) > tol;
}

}  // namespace eshpc

#endif  // ESHPC_CORE_HPP_
