/**
 * @file wall.hpp
 * @brief Unilateral spring-damper plane with smoothed Coulomb sliding friction.
 */
#pragma once

#include "mmude/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mmude {

struct WallModel {
  Vec3 point = Vec3(0.0, 0.8, 0.0);
  Vec3 normal = Vec3(0.0, -1.0, 0.0);  // unit, pointing out of the wall towards free space
  double stiffness = 1.0e4;            // N/m
  double damping = 50.0;               // N s/m
  double friction = 0.1;               // tangential coefficient
  double slip_smoothing = 1e-3;        // m/s

  static WallModel rigid(double y = 0.8) {
    WallModel w;
    w.point = Vec3(0.0, y, 0.0);
    w.stiffness = 5.0e4;
    w.damping = 100.0;
    return w;
  }
  static WallModel compliant(double y = 0.8) {
    WallModel w;
    w.point = Vec3(0.0, y, 0.0);
    return w;
  }

  void validate() const {
    if (!(stiffness > 0.0)) throw std::invalid_argument("wall.stiffness must be > 0");
    if (damping < 0.0) throw std::invalid_argument("wall.damping must be >= 0");
    if (friction < 0.0) throw std::invalid_argument("wall.friction must be >= 0");
    if (std::abs(normal.norm() - 1.0) > 1e-9) throw std::invalid_argument("wall.normal must be unit norm");
  }

  /// Depth of the point behind the surface (positive inside the wall).
  [[nodiscard]] double penetration(const Vec3& p) const { return -(p - point).dot(normal); }
};

struct ContactState {
  double penetration = 0.0;
  double normal_force = 0.0;  // >= 0
  Vec3 force = Vec3::Zero();  // on the end effector, {i}
};

inline ContactState contact(const WallModel& wall, const Vec3& p, const Vec3& v) {
  ContactState c;
  c.penetration = wall.penetration(p);
  if (c.penetration <= 0.0) return c;
  const double rate = -v.dot(wall.normal);
  c.normal_force = std::max(0.0, wall.stiffness * c.penetration + wall.damping * rate);
  const Vec3 vt = v - v.dot(wall.normal) * wall.normal;
  const double speed = std::sqrt(vt.squaredNorm() + wall.slip_smoothing * wall.slip_smoothing);
  c.force = c.normal_force * wall.normal - wall.friction * c.normal_force * vt / speed;
  return c;
}

/// Wrench the wall exerts on the end effector, applied at the tool point.
inline Wrench contact_wrench(const WallModel& wall, const Pose& ee, const Vec6& ee_twist) {
  const ContactState c = contact(wall, ee.p, ee_twist.head<3>());
  Vec6 w = Vec6::Zero();
  w.head<3>() = c.force;
  return Wrench(w, Frame::inertial);
}

}  // namespace mmude
