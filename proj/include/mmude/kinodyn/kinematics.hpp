/**
 * @file kinematics.hpp
 * @brief Forward kinematics, Jacobians and base-coupling kinematic terms.
 *
 * Arm quantities are computed in the base frame {b}; base-dependent quantities are rotated
 * into the inertial frame {i}. Twists are ordered [linear; angular].
 */
#pragma once

#include "mmude/core/rotation.hpp"
#include "mmude/core/types.hpp"
#include "mmude/kinodyn/robot_model.hpp"

#include <array>

namespace mmude {

struct JointState {
  VecX q;
  VecX qd;

  JointState() = default;
  JointState(VecX q_, VecX qd_) : q(std::move(q_)), qd(std::move(qd_)) {}
  static JointState at_rest(const VecX& q) { return {q, VecX::Zero(q.size())}; }

  [[nodiscard]] bool finite() const { return q.allFinite() && qd.allFinite(); }
};

/// Pose and velocity of the mobile base in the inertial frame.
struct BaseState {
  Vec3 position = Vec3::Zero();
  Mat3 R = Mat3::Identity();
  Vec3 linear_velocity = Vec3::Zero();
  Vec3 angular_velocity = Vec3::Zero();

  [[nodiscard]] Vec3 euler_zyx() const { return euler_zyx_from_rotation(R); }

  /// eta_dot = [p_dot; omega]
  [[nodiscard]] Vec6 twist() const {
    Vec6 t;
    t << linear_velocity, angular_velocity;
    return t;
  }

  [[nodiscard]] bool valid() const {
    return position.allFinite() && linear_velocity.allFinite() && angular_velocity.allFinite() &&
           orthonormality_error(R) < 1e-9 && R.determinant() > 0.0;
  }

  static BaseState from_euler(const Vec3& position, const Vec3& rpy, const Vec3& v = Vec3::Zero(),
                              const Vec3& w = Vec3::Zero()) {
    return {position, rotation_from_euler_zyx(rpy), v, w};
  }
};

/// Base acceleration; known to the plant and to validation code, never to the controllers.
struct BaseAcceleration {
  Vec3 linear = Vec3::Zero();
  Vec3 angular = Vec3::Zero();

  [[nodiscard]] Vec6 as_vector() const {
    Vec6 a;
    a << linear, angular;
    return a;
  }
};

/// Joint axes, joint origins and the end-effector pose of the arm, all in {b}.
struct ChainFrames {
  int n = 0;
  std::array<Vec3, kMaxDof> axis;
  std::array<Vec3, kMaxDof> origin;
  std::array<Pose, kMaxDof> link;  // link frame after the joint rotation
  Pose ee;
};

inline ChainFrames chain_frames(const RobotModel& model, const VecX& q) {
  ChainFrames f;
  f.n = model.dof();
  Pose T = model.mount;
  for (int i = 0; i < f.n; ++i) {
    const Link& l = model.links[i];
    T = T * l.origin();
    f.axis[i] = T.R * l.axis;
    f.origin[i] = T.p;
    T.R = T.R * axis_angle(l.axis, q[i]);
    f.link[i] = T;
  }
  f.ee = T * model.tool;
  return f;
}

/// End-effector pose relative to {b}.
inline Pose ee_pose_in_base(const RobotModel& model, const VecX& q) { return chain_frames(model, q).ee; }

/// End-effector pose in {i}: p_x = p_eta + R p_ee^b, R_ee = R R_ee^b.
inline Pose forward_kinematics(const RobotModel& model, const JointState& joints, const BaseState& base) {
  const Pose rel = ee_pose_in_base(model, joints.q);
  return {base.R * rel.R, base.position + base.R * rel.p};
}

inline Mat6X jacobian_from_frames(const ChainFrames& f) {
  Mat6X J(6, f.n);
  for (int i = 0; i < f.n; ++i) {
    J.col(i) << f.axis[i].cross(f.ee.p - f.origin[i]), f.axis[i];
  }
  return J;
}

/// Geometric Jacobian of the arm in {b}: [p_dot^b; omega^b] = J q_dot.
inline Mat6X jacobian(const RobotModel& model, const JointState& joints) {
  return jacobian_from_frames(chain_frames(model, joints.q));
}

inline Mat6X augmented_jacobian(const Mat6X& J, const BaseState& base) {
  Mat6X Jh(6, J.cols());
  Jh.topRows<3>() = base.R * J.topRows<3>();
  Jh.bottomRows<3>() = base.R * J.bottomRows<3>();
  return Jh;
}

/// Arm-only time derivative of J in {b} (base frame held fixed).
inline Mat6X jacobian_time_derivative_body(const ChainFrames& f, const VecX& qd) {
  const int n = f.n;
  Mat6X Jd(6, n);
  // ee velocity and per-joint origin velocities from the chain
  Vec3 pe_dot = Vec3::Zero();
  for (int k = 0; k < n; ++k) pe_dot += qd[k] * f.axis[k].cross(f.ee.p - f.origin[k]);
  Vec3 w = Vec3::Zero();  // angular velocity of the parent of joint i
  for (int i = 0; i < n; ++i) {
    Vec3 pi_dot = Vec3::Zero();
    for (int k = 0; k < i; ++k) pi_dot += qd[k] * f.axis[k].cross(f.origin[i] - f.origin[k]);
    const Vec3 ai_dot = w.cross(f.axis[i]);
    Jd.col(i) << ai_dot.cross(f.ee.p - f.origin[i]) + f.axis[i].cross(pe_dot - pi_dot), ai_dot;
    w += qd[i] * f.axis[i];
  }
  return Jd;
}

inline Mat6X jacobian_time_derivative_body(const RobotModel& model, const JointState& joints) {
  return jacobian_time_derivative_body(chain_frames(model, joints.q), joints.qd);
}

/// Time derivative of the augmented Jacobian including base rotation.
inline Mat6X jacobian_time_derivative(const Mat6X& J, const Mat6X& Jdot_body, const BaseState& base) {
  const Mat3 WR = skew(base.angular_velocity) * base.R;
  Mat6X out(6, J.cols());
  out.topRows<3>() = WR * J.topRows<3>() + base.R * Jdot_body.topRows<3>();
  out.bottomRows<3>() = WR * J.bottomRows<3>() + base.R * Jdot_body.bottomRows<3>();
  return out;
}

inline Mat6X jacobian_time_derivative(const RobotModel& model, const JointState& joints, const BaseState& base) {
  const ChainFrames f = chain_frames(model, joints.q);
  return jacobian_time_derivative(jacobian_from_frames(f), jacobian_time_derivative_body(f, joints.qd), base);
}

/// d = [omega_b x P; 0], P = lever arm from the base origin to the end effector in {i}.
inline Vec6 coupling_velocity_term(const BaseState& base, const Vec3& ee_in_base) {
  Vec6 d = Vec6::Zero();
  d.head<3>() = base.angular_velocity.cross(base.R * ee_in_base);
  return d;
}

inline Vec6 coupling_velocity_term(const BaseState& base, const JointState& joints, const RobotModel& model) {
  return coupling_velocity_term(base, ee_pose_in_base(model, joints.q).p);
}

/// d_dot = [alpha x P + omega x P_dot; 0], P_dot = omega x P + R p_dot^b.
inline Vec6 coupling_velocity_rate(const BaseState& base, const BaseAcceleration& acc, const Vec3& ee_in_base,
                                   const Vec3& ee_vel_in_base) {
  const Vec3 P = base.R * ee_in_base;
  const Vec3 P_dot = base.angular_velocity.cross(P) + base.R * ee_vel_in_base;
  Vec6 dd = Vec6::Zero();
  dd.head<3>() = acc.angular.cross(P) + base.angular_velocity.cross(P_dot);
  return dd;
}

/// End-effector twist in {i}: x_dot = eta_dot + J_hat q_dot + d.
inline Vec6 ee_twist(const RobotModel& model, const JointState& joints, const BaseState& base) {
  const ChainFrames f = chain_frames(model, joints.q);
  const Mat6X Jh = augmented_jacobian(jacobian_from_frames(f), base);
  return base.twist() + Jh * joints.qd + coupling_velocity_term(base, f.ee.p);
}

}  // namespace mmude
