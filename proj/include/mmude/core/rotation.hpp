/**
 * @file rotation.hpp
 * @brief SO(3) helpers: skew matrices, exp/log maps and Z-Y-X Euler conversion.
 */
#pragma once

#include "mmude/core/types.hpp"

#include <algorithm>
#include <cmath>

namespace mmude {

inline Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),  //
      v.z(), 0.0, -v.x(),   //
      -v.y(), v.x(), 0.0;
  return s;
}

inline Mat3 rot_x(double a) { return Eigen::AngleAxisd(a, Vec3::UnitX()).toRotationMatrix(); }
inline Mat3 rot_y(double a) { return Eigen::AngleAxisd(a, Vec3::UnitY()).toRotationMatrix(); }
inline Mat3 rot_z(double a) { return Eigen::AngleAxisd(a, Vec3::UnitZ()).toRotationMatrix(); }

/// Rotation about a unit axis (Rodrigues).
inline Mat3 axis_angle(const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

inline Mat3 so3_exp(const Vec3& w) {
  const double th = w.norm();
  if (th < 1e-12) return Mat3::Identity() + skew(w);
  return Eigen::AngleAxisd(th, w / th).toRotationMatrix();
}

/// Rotation vector of R (axis * angle), angle in [0, pi].
inline Vec3 so3_log(const Mat3& R) {
  const double c = std::clamp((R.trace() - 1.0) * 0.5, -1.0, 1.0);
  const double th = std::acos(c);
  const Vec3 vee(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
  if (th < 1e-6) {
    // first-order series; exact to O(th^3)
    return 0.5 * (1.0 + th * th / 6.0) * vee;
  }
  if (M_PI - th < 1e-6) {
    // near pi the antisymmetric part vanishes; recover the axis from the symmetric part
    const Mat3 B = 0.5 * (R + Mat3::Identity());
    int k = 0;
    B.diagonal().maxCoeff(&k);
    Vec3 axis = B.col(k) / std::sqrt(std::max(B(k, k), 1e-300));
    axis.normalize();
    if (axis.dot(vee) < 0.0) axis = -axis;
    return th * axis;
  }
  return th / (2.0 * std::sin(th)) * vee;
}

/// R = Rz(yaw) Ry(pitch) Rx(roll); angles stored as (roll, pitch, yaw).
inline Mat3 rotation_from_euler_zyx(const Vec3& rpy) {
  return rot_z(rpy.z()) * rot_y(rpy.y()) * rot_x(rpy.x());
}

inline Vec3 euler_zyx_from_rotation(const Mat3& R) {
  const double pitch = std::asin(std::clamp(-R(2, 0), -1.0, 1.0));
  const double roll = std::atan2(R(2, 1), R(2, 2));
  const double yaw = std::atan2(R(1, 0), R(0, 0));
  return {roll, pitch, yaw};
}

inline double orthonormality_error(const Mat3& R) {
  return (R.transpose() * R - Mat3::Identity()).norm();
}

}  // namespace mmude
