/**
 * @file impedance.hpp
 * @brief Hybrid motion/force impedance target and error terms.
 */
#pragma once

#include "mmude/core/rotation.hpp"
#include "mmude/core/types.hpp"

#include <array>
#include <stdexcept>
#include <string>

namespace mmude {

enum class AxisMode { motion, force };

using AxisModes = std::array<AxisMode, 6>;

inline AxisModes all_motion() {
  AxisModes m;
  m.fill(AxisMode::motion);
  return m;
}

/// Diagonal impedance gains. The inertia is the task-space inertia M0 itself.
struct ImpedanceParams {
  Vec6 Cd = Vec6::Zero();  // damping
  Vec6 Kd = Vec6::Zero();  // stiffness
  Vec6 Kf = Vec6::Zero();  // force-error gain

  void validate() const {
    if ((Cd.array() < 0.0).any()) throw std::invalid_argument("impedance.Cd: entries must be >= 0");
    if ((Kd.array() < 0.0).any()) throw std::invalid_argument("impedance.Kd: entries must be >= 0");
    if (!Cd.allFinite() || !Kd.allFinite() || !Kf.allFinite()) {
      throw std::invalid_argument("impedance: gains must be finite");
    }
  }

  /// Checks the mode-dependent invariants for the given axis selection.
  void validate_for(const AxisModes& modes) const {
    validate();
    for (int i = 0; i < 6; ++i) {
      if (modes[i] == AxisMode::motion && !(Kd[i] > 0.0)) {
        throw std::invalid_argument("impedance.Kd[" + std::to_string(i) + "] must be > 0 on a motion axis");
      }
    }
  }

  /// Force-error gain with motion axes masked out.
  [[nodiscard]] Vec6 effective_kf(const AxisModes& modes) const {
    Vec6 k = Kf;
    for (int i = 0; i < 6; ++i)
      if (modes[i] == AxisMode::motion) k[i] = 0.0;
    return k;
  }

  static ImpedanceParams simulation_defaults() {
    ImpedanceParams p;
    p.Kd << 200, 200, 200, 20, 20, 20;
    p.Cd << 2, 2, 2, 1, 1, 1;
    p.Kf << 0, 5, 0, 0, 0, 0;
    return p;
  }

  static ImpedanceParams experiment_defaults() {
    ImpedanceParams p;
    p.Kd << 25, 25, 25, 2.5, 2.5, 2.5;
    p.Cd << 10, 10, 10, 1, 1, 1;
    p.Kf << 0, 1, 0, 0, 0, 0;
    return p;
  }
};

/// Desired motion and contact wrench in {i}. f_ed is the wrench the environment should exert
/// on the end effector.
struct ControlTarget {
  Pose x_d;
  Vec6 xd_dot = Vec6::Zero();
  Vec6 xd_ddot = Vec6::Zero();
  Wrench f_ed = Wrench::zero(Frame::inertial);
  AxisModes mode = all_motion();

  [[nodiscard]] bool valid() const {
    if (!x_d.p.allFinite() || !x_d.R.allFinite() || !xd_dot.allFinite() || !xd_ddot.allFinite()) return false;
    for (int i = 0; i < 6; ++i) {
      if (mode[i] == AxisMode::motion && f_ed.value[i] != 0.0) return false;
      if (!std::isfinite(f_ed.value[i])) return false;
    }
    return true;
  }
};

struct ImpedanceErrors {
  Vec6 e = Vec6::Zero();
  Vec6 e_dot = Vec6::Zero();
  Vec6 e_f = Vec6::Zero();
};

/// Orientation error whose small-angle limit is the rotation taking R_d to R.
inline Vec3 orientation_error(const Mat3& R, const Mat3& R_d) { return so3_log(R * R_d.transpose()); }

/// e = x - x_d (rotation-log orientation part), e_dot = x_dot - xd_dot, e_f = f_e - f_ed
/// zeroed on motion axes.
inline ImpedanceErrors impedance_error(const Pose& x, const Vec6& x_dot, const ControlTarget& target,
                                       const Wrench& f_e) {
  require_frame(f_e, Frame::inertial, "impedance_error");
  require_frame(target.f_ed, Frame::inertial, "impedance_error");
  ImpedanceErrors r;
  r.e << x.p - target.x_d.p, orientation_error(x.R, target.x_d.R);
  r.e_dot = x_dot - target.xd_dot;
  for (int i = 0; i < 6; ++i) r.e_f[i] = target.mode[i] == AxisMode::force ? f_e.value[i] - target.f_ed.value[i] : 0.0;
  return r;
}

}  // namespace mmude
