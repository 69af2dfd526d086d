/**
 * @file friction.hpp
 * @brief Smoothed viscous + Coulomb joint friction and its dissipation potential.
 */
#pragma once

#include "mmude/core/types.hpp"
#include "mmude/kinodyn/robot_model.hpp"

#include <cmath>

namespace mmude {

inline constexpr double kCoulombSmoothing = 0.01;  // rad/s

/// -(viscous qd + coulomb tanh(qd / 0.01)) per joint.
inline VecX joint_friction(const RobotModel& model, const VecX& qd) {
  VecX f(qd.size());
  for (int i = 0; i < qd.size(); ++i) {
    const auto& p = model.friction[i];
    f[i] = -(p.viscous * qd[i] + p.coulomb * std::tanh(qd[i] / kCoulombSmoothing));
  }
  return f;
}

namespace detail {

inline double log_cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

}  // namespace detail

/// Convex potential whose gradient is minus the friction torque.
inline double friction_potential(const JointFriction& p, double v) {
  return 0.5 * p.viscous * v * v + p.coulomb * kCoulombSmoothing * detail::log_cosh(v / kCoulombSmoothing);
}

inline double friction_slope(const JointFriction& p, double v) {
  const double t = std::tanh(v / kCoulombSmoothing);
  return p.viscous + p.coulomb / kCoulombSmoothing * (1.0 - t * t);
}

inline bool has_friction(const RobotModel& model) {
  for (const auto& f : model.friction)
    if (f.viscous != 0.0 || f.coulomb != 0.0) return true;
  return false;
}

}  // namespace mmude
