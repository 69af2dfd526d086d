/**
 * @file dynamics.hpp
 * @brief Joint-space and task-space rigid-body dynamics of the arm.
 *
 * Spatial vectors used internally are ordered [angular; linear] and expressed in {b} about
 * the origin of {b}, so composite inertias are plain sums. Public task-space quantities use
 * the [linear; angular] ordering of kinematics.hpp.
 */
#pragma once

#include "mmude/core/rotation.hpp"
#include "mmude/core/types.hpp"
#include "mmude/kinodyn/kinematics.hpp"
#include "mmude/kinodyn/robot_model.hpp"

#include <array>

namespace mmude {

namespace spatial {

/// Motion cross product matrix: crm(v) * m = v x m.
inline Mat6 crm(const Vec6& v) {
  Mat6 X = Mat6::Zero();
  const Mat3 W = skew(v.head<3>());
  X.topLeftCorner<3, 3>() = W;
  X.bottomLeftCorner<3, 3>() = skew(v.tail<3>());
  X.bottomRightCorner<3, 3>() = W;
  return X;
}

/// Force cross product matrix: crf(v) = -crm(v)^T.
inline Mat6 crf(const Vec6& v) { return -crm(v).transpose(); }

inline Vec6 cross_motion(const Vec6& a, const Vec6& b) {
  Vec6 r;
  r.head<3>() = a.head<3>().cross(b.head<3>());
  r.tail<3>() = a.head<3>().cross(b.tail<3>()) + a.tail<3>().cross(b.head<3>());
  return r;
}

inline Vec6 cross_force(const Vec6& v, const Vec6& f) {
  Vec6 r;
  r.head<3>() = v.head<3>().cross(f.head<3>()) + v.tail<3>().cross(f.tail<3>());
  r.tail<3>() = v.head<3>().cross(f.tail<3>());
  return r;
}

/// Rigid-body inertia about the frame origin for a body with COM c and rotary inertia Ic.
inline Mat6 body_inertia(double m, const Vec3& c, const Mat3& Ic) {
  const Mat3 C = skew(c);
  Mat6 I;
  I.topLeftCorner<3, 3>() = Ic + m * C * C.transpose();
  I.topRightCorner<3, 3>() = m * C;
  I.bottomLeftCorner<3, 3>() = m * C.transpose();
  I.bottomRightCorner<3, 3>() = m * Mat3::Identity();
  return I;
}

}  // namespace spatial

/// Per-link spatial quantities in {b} for one configuration.
struct ArmSpatial {
  int n = 0;
  std::array<Vec6, kMaxDof> s;          // joint motion axes
  std::array<Mat6, kMaxDof> inertia;    // link inertias
  std::array<Mat6, kMaxDof> composite;  // sum of inertias of links i..n-1
  std::array<double, kMaxDof> mass;
  std::array<Vec3, kMaxDof> com;        // link COMs
};

inline ArmSpatial arm_spatial(const RobotModel& model, const ChainFrames& f) {
  ArmSpatial a;
  a.n = f.n;
  for (int i = 0; i < f.n; ++i) {
    const Link& l = model.links[i];
    a.s[i] << f.axis[i], f.origin[i].cross(f.axis[i]);
    const Pose& T = f.link[i];
    a.com[i] = T.apply(l.com);
    a.mass[i] = l.mass;
    a.inertia[i] = spatial::body_inertia(l.mass, a.com[i], T.R * l.inertia * T.R.transpose());
  }
  for (int i = f.n - 1; i >= 0; --i) {
    a.composite[i] = a.inertia[i];
    if (i + 1 < f.n) a.composite[i] += a.composite[i + 1];
  }
  return a;
}

/// Composite-rigid-body mass matrix.
inline MatX mass_matrix(const ArmSpatial& a) {
  MatX M(a.n, a.n);
  for (int j = 0; j < a.n; ++j) {
    const Vec6 F = a.composite[j] * a.s[j];
    for (int i = 0; i <= j; ++i) {
      M(i, j) = a.s[i].dot(F);
      M(j, i) = M(i, j);
    }
  }
  return M;
}

inline MatX mass_matrix(const RobotModel& model, const VecX& q) {
  return mass_matrix(arm_spatial(model, chain_frames(model, q)));
}

/// Partial derivatives dM/dq_k, k = 0..n-1.
inline std::array<MatX, kMaxDof> mass_matrix_partials(const ArmSpatial& a) {
  const int n = a.n;
  std::array<MatX, kMaxDof> dM;
  std::array<Mat6, kMaxDof> crm_s, crf_s;
  for (int k = 0; k < n; ++k) {
    crm_s[k] = spatial::crm(a.s[k]);
    crf_s[k] = -crm_s[k].transpose();
  }
  for (int k = 0; k < n; ++k) {
    dM[k].setZero(n, n);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i <= j; ++i) {
        const int m = j;  // max(i, j)
        const Mat6& Ic = a.composite[std::max(m, k)];
        // d s_l / d q_k = s_k x s_l for l > k
        const Vec6 dsi = i > k ? Vec6(crm_s[k] * a.s[i]) : Vec6::Zero();
        const Vec6 dsj = j > k ? Vec6(crm_s[k] * a.s[j]) : Vec6::Zero();
        const Mat6& Im = a.composite[m];
        double v = dsi.dot(Im * a.s[j]) + a.s[i].dot(Im * dsj);
        // d Ic_m / d q_k = crf(s_k) Ic_max(m,k) - Ic_max(m,k) crm(s_k)
        v += a.s[i].dot(crf_s[k] * (Ic * a.s[j]) - Ic * (crm_s[k] * a.s[j]));
        dM[k](i, j) = v;
        dM[k](j, i) = v;
      }
    }
  }
  return dM;
}

/// Coriolis/centrifugal matrix from the Christoffel symbols of M.
inline MatX coriolis_matrix(const ArmSpatial& a, const VecX& qd) {
  const int n = a.n;
  const auto dM = mass_matrix_partials(a);
  MatX C = MatX::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double c = 0.0;
      for (int k = 0; k < n; ++k) c += 0.5 * (dM[k](i, j) + dM[j](i, k) - dM[i](j, k)) * qd[k];
      C(i, j) = c;
    }
  }
  return C;
}

/// Gradient of the potential energy for gravity g (expressed in {b}).
inline VecX gravity_vector(const ArmSpatial& a, const ChainFrames& f, const Vec3& g) {
  const int n = a.n;
  VecX G(n);
  Vec3 mc = Vec3::Zero();  // sum of m_k c_k for k >= i
  double msum = 0.0;
  for (int i = n - 1; i >= 0; --i) {
    mc += a.mass[i] * a.com[i];
    msum += a.mass[i];
    G[i] = -g.dot(f.axis[i].cross(mc - msum * f.origin[i]));
  }
  return G;
}

/// Inverse dynamics by recursive Newton-Euler: tau = M qdd + C qd + G.
inline VecX rnea(const ArmSpatial& a, const VecX& qd, const VecX& qdd, const Vec3& g) {
  const int n = a.n;
  std::array<Vec6, kMaxDof> F;
  Vec6 v = Vec6::Zero();
  Vec6 acc = Vec6::Zero();
  acc.tail<3>() = -g;
  for (int i = 0; i < n; ++i) {
    const Vec6 vs = a.s[i] * qd[i];
    acc += a.s[i] * qdd[i] + spatial::cross_motion(v, vs);
    v += vs;
    const Vec6 Iv = a.inertia[i] * v;
    F[i] = a.inertia[i] * acc + spatial::cross_force(v, Iv);
  }
  VecX tau(n);
  Vec6 Fc = Vec6::Zero();
  for (int i = n - 1; i >= 0; --i) {
    Fc += F[i];
    tau[i] = a.s[i].dot(Fc);
  }
  return tau;
}

struct JointSpaceMatrices {
  MatX M;
  MatX C;
  VecX G;
};

/// M_q, C_q, G_q for gravity g expressed in {b}.
inline JointSpaceMatrices joint_space_matrices(const RobotModel& model, const JointState& joints, const Vec3& g) {
  const ChainFrames f = chain_frames(model, joints.q);
  const ArmSpatial a = arm_spatial(model, f);
  return {mass_matrix(a), coriolis_matrix(a, joints.qd), gravity_vector(a, f, g)};
}

inline JointSpaceMatrices joint_space_matrices(const RobotModel& model, const JointState& joints) {
  return joint_space_matrices(model, joints, model.gravity);
}

/// Gravity of @p model rotated into {b}.
inline Vec3 gravity_in_base(const RobotModel& model, const BaseState& base) {
  return base.R.transpose() * model.gravity;
}

inline double kinetic_energy(const MatX& M, const VecX& qd) { return 0.5 * qd.dot(M * qd); }

inline double potential_energy(const ArmSpatial& a, const Vec3& g) {
  double U = 0.0;
  for (int i = 0; i < a.n; ++i) U -= a.mass[i] * g.dot(a.com[i]);
  return U;
}

// ---------------------------------------------------------------------------
// Task space
// ---------------------------------------------------------------------------

inline constexpr double kDefaultDamping = 0.01;
inline constexpr double kNearSingularSigma = 1e-3;

struct PseudoInverse {
  MatX6 pinv;
  double sigma_min = 0.0;
  bool near_singular = false;
};

/// J^T (J J^T + lambda^2 I)^-1, evaluated through the SVD as V diag(s / (s^2 + lambda^2)) U^T.
inline PseudoInverse damped_pseudoinverse(const Mat6X& J, double lambda = kDefaultDamping) {
  if (lambda < 0.0) throw std::invalid_argument("damped_pseudoinverse: lambda must be >= 0");
  Eigen::JacobiSVD<Mat6X> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  VecX w(s.size());
  for (int i = 0; i < s.size(); ++i) {
    const double den = s[i] * s[i] + lambda * lambda;
    w[i] = den > 0.0 ? s[i] / den : 0.0;
  }
  PseudoInverse out;
  out.pinv = svd.matrixV() * w.asDiagonal() * svd.matrixU().transpose();
  out.sigma_min = s.size() > 0 ? s[s.size() - 1] : 0.0;
  out.near_singular = out.sigma_min < kNearSingularSigma;
  return out;
}

struct TaskMatrices {
  Mat6 M0 = Mat6::Zero();
  Mat6 C0 = Mat6::Zero();
  Vec6 G0 = Vec6::Zero();
  MatX6 Jpinv;
  double sigma_min = 0.0;
  bool near_singular = false;
};

/// M0 = Jp^T M Jp, C0 = Jp^T C Jp - M0 Jdot Jp, G0 = Jp^T G with Jp the damped pseudo-inverse.
inline TaskMatrices task_space_matrices(const MatX& M, const MatX& C, const VecX& G, const Mat6X& Jh,
                                        const Mat6X& Jh_dot, double lambda = kDefaultDamping) {
  const PseudoInverse P = damped_pseudoinverse(Jh, lambda);
  TaskMatrices t;
  t.Jpinv = P.pinv;
  t.sigma_min = P.sigma_min;
  t.near_singular = P.near_singular;
  const Mat6X JpT = P.pinv.transpose();
  t.M0 = JpT * M * P.pinv;
  t.M0 = 0.5 * (t.M0 + t.M0.transpose());
  t.C0 = JpT * C * P.pinv - t.M0 * Jh_dot * P.pinv;
  t.G0 = JpT * G;
  return t;
}

/// Full coupled task-space state of the end effector.
struct TaskState {
  Pose pose;             // in {i}
  Vec6 xdot = Vec6::Zero();
  Mat6X J;               // {b}
  Mat6X Jh;              // {i}
  Mat6X Jh_dot;
  Vec6 d = Vec6::Zero();
  Vec3 ee_in_base = Vec3::Zero();
  Vec3 ee_vel_in_base = Vec3::Zero();
  JointSpaceMatrices joint;
  TaskMatrices task;

  /// Position followed by Z-Y-X Euler angles, for logging.
  [[nodiscard]] Vec6 pose_vector() const {
    Vec6 x;
    x << pose.p, euler_zyx_from_rotation(pose.R);
    return x;
  }
};

/// Evaluates every kinematic and dynamic quantity used by the controllers.
///
/// @param include_base_rotation_rate when false, the Jacobian rate ignores base rotation
///        (as seen by a controller that treats the base as fixed).
inline TaskState compute_task_state(const RobotModel& model, const JointState& joints, const BaseState& base,
                                    double lambda = kDefaultDamping, bool include_base_rotation_rate = true) {
  TaskState s;
  const ChainFrames f = chain_frames(model, joints.q);
  const ArmSpatial a = arm_spatial(model, f);
  s.pose = {base.R * f.ee.R, base.position + base.R * f.ee.p};
  s.J = jacobian_from_frames(f);
  s.Jh = augmented_jacobian(s.J, base);
  const Mat6X Jd_body = jacobian_time_derivative_body(f, joints.qd);
  BaseState rate_base = base;
  if (!include_base_rotation_rate) rate_base.angular_velocity.setZero();
  s.Jh_dot = jacobian_time_derivative(s.J, Jd_body, rate_base);
  s.ee_in_base = f.ee.p;
  s.ee_vel_in_base = s.J.topRows<3>() * joints.qd;
  s.d = coupling_velocity_term(base, f.ee.p);
  s.xdot = base.twist() + s.Jh * joints.qd + s.d;
  s.joint = {mass_matrix(a), coriolis_matrix(a, joints.qd), gravity_vector(a, f, gravity_in_base(model, base))};
  s.task = task_space_matrices(s.joint.M, s.joint.C, s.joint.G, s.Jh, s.Jh_dot, lambda);
  return s;
}

/// mu_c = M0 (eta_ddot + d_dot) + C0 (eta_dot + d), in {i}.
inline Wrench coupling_wrench(const Mat6& M0, const Mat6& C0, const BaseState& base, const Vec6& d,
                              const Vec6& d_dot, const BaseAcceleration& base_accel) {
  return Wrench(M0 * (base_accel.as_vector() + d_dot) + C0 * (base.twist() + d), Frame::inertial);
}

}  // namespace mmude
