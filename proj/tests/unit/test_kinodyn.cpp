#include "mmude/kinodyn/dynamics.hpp"
#include "mmude/kinodyn/kinematics.hpp"
#include "mmude/kinodyn/robot_model.hpp"

#include "../support/kinodyn_fixtures.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <random>

using namespace mmude;
using namespace fixtures;

namespace {

// Independent FK: 4x4 homogeneous transforms built from the raw link parameters.
Eigen::Matrix4d homogeneous(const Mat3& R, const Vec3& p) {
  Eigen::Matrix4d T = Eigen::Matrix4d::Identity();
  T.topLeftCorner<3, 3>() = R;
  T.topRightCorner<3, 1>() = p;
  return T;
}

Eigen::Matrix4d fk_homogeneous(const RobotModel& m, const VecX& q, const BaseState& base) {
  Eigen::Matrix4d T = homogeneous(base.R, base.position) * homogeneous(m.mount.R, m.mount.p);
  for (int i = 0; i < m.dof(); ++i) {
    const Link& l = m.links[i];
    const Mat3 Ro = (Eigen::AngleAxisd(l.origin_rpy.z(), Vec3::UnitZ()) *
                     Eigen::AngleAxisd(l.origin_rpy.y(), Vec3::UnitY()) *
                     Eigen::AngleAxisd(l.origin_rpy.x(), Vec3::UnitX()))
                        .toRotationMatrix();
    T = T * homogeneous(Ro, l.origin_xyz) * homogeneous(Eigen::AngleAxisd(q[i], l.axis).toRotationMatrix(), Vec3::Zero());
  }
  return T * homogeneous(m.tool.R, m.tool.p);
}

}  // namespace

// ---------------------------------------------------------------------------
// Forward kinematics
// ---------------------------------------------------------------------------

TEST(ForwardKinematics, PlanarTwoLinkStraight) {
  const RobotModel m = make_planar_arm({0.5, 0.5}, {1.0, 1.0});
  const Pose p = forward_kinematics(m, JointState::at_rest(VecX::Zero(2)), BaseState{});
  EXPECT_NEAR((p.p - Vec3(1.0, 0.0, 0.0)).norm(), 0.0, 1e-15);
}

TEST(ForwardKinematics, BaseTranslationShiftsExactly) {
  const RobotModel m = make_planar_arm({0.5, 0.5}, {1.0, 1.0});
  BaseState b;
  b.position = Vec3(1.0, 2.0, 0.0);
  const Pose p0 = forward_kinematics(m, JointState::at_rest(VecX::Zero(2)), BaseState{});
  const Pose p1 = forward_kinematics(m, JointState::at_rest(VecX::Zero(2)), b);
  EXPECT_EQ(p1.p - p0.p, Vec3(1.0, 2.0, 0.0));
}

TEST(ForwardKinematics, MatchesHomogeneousChain) {
  std::mt19937 rng(1);
  const RobotModel m = make_ur5e_like();
  for (int k = 0; k < 200; ++k) {
    const VecX q = random_q(rng, 6);
    const BaseState b = random_base(rng);
    const Pose p = forward_kinematics(m, JointState::at_rest(q), b);
    const Eigen::Matrix4d T = fk_homogeneous(m, q, b);
    ASSERT_LT((p.p - T.topRightCorner<3, 1>()).norm(), 1e-10);
    ASSERT_LT((p.R - T.topLeftCorner<3, 3>()).norm(), 1e-10);
  }
}

// ---------------------------------------------------------------------------
// Jacobians
// ---------------------------------------------------------------------------

TEST(Jacobian, PlanarTwoLinkClosedForm) {
  const RobotModel m = make_planar_arm({0.5, 0.5}, {1.0, 1.0});
  const Mat6X J = jacobian(m, JointState::at_rest(VecX::Zero(2)));
  EXPECT_LT((J.block<3, 1>(0, 0) - Vec3(0.0, 1.0, 0.0)).norm(), 1e-15);
  EXPECT_LT((J.block<3, 1>(0, 1) - Vec3(0.0, 0.5, 0.0)).norm(), 1e-15);
}

TEST(Jacobian, MatchesCentralDifferences) {
  std::mt19937 rng(2);
  const RobotModel m = make_ur5e_like();
  const double eps = 1e-6;
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const VecX q = random_q(rng, 6);
    const Mat6X J = jacobian(m, JointState::at_rest(q));
    for (int i = 0; i < 6; ++i) {
      VecX qp = q, qm = q;
      qp[i] += eps;
      qm[i] -= eps;
      const Pose a = ee_pose_in_base(m, qp), b = ee_pose_in_base(m, qm);
      Vec6 col;
      col << (a.p - b.p) / (2 * eps), so3_log(a.R * b.R.transpose()) / (2 * eps);
      worst = std::max(worst, (col - J.col(i)).cwiseAbs().maxCoeff());
    }
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Jacobian, RotationalRowsAreJointAxes) {
  std::mt19937 rng(3);
  const RobotModel m = make_ur5e_like();
  const VecX q = random_q(rng, 6);
  const ChainFrames f = chain_frames(m, q);
  const Mat6X J = jacobian_from_frames(f);
  Mat3 R = m.mount.R;
  for (int i = 0; i < 6; ++i) {
    R = R * m.links[i].origin().R;
    EXPECT_LT((J.block<3, 1>(3, i) - R * m.links[i].axis).norm(), 1e-14);
    R = R * axis_angle(m.links[i].axis, q[i]);
  }
}

TEST(AugmentedJacobian, IdentityBaseLeavesJacobianUnchanged) {
  std::mt19937 rng(4);
  const RobotModel m = make_ur5e_like();
  const Mat6X J = jacobian(m, JointState::at_rest(random_q(rng, 6)));
  EXPECT_EQ(augmented_jacobian(J, BaseState{}), J);
}

TEST(AugmentedJacobian, YawRotatesTranslationalColumns) {
  std::mt19937 rng(5);
  const RobotModel m = make_ur5e_like();
  const Mat6X J = jacobian(m, JointState::at_rest(random_q(rng, 6)));
  BaseState b;
  b.R = rot_z(M_PI / 2);
  const Mat6X Jh = augmented_jacobian(J, b);
  for (int i = 0; i < 6; ++i) {
    EXPECT_NEAR(Jh(0, i), -J(1, i), 1e-15);
    EXPECT_NEAR(Jh(1, i), J(0, i), 1e-15);
    EXPECT_NEAR(Jh(2, i), J(2, i), 1e-15);
  }
}

TEST(AugmentedJacobian, IsometryPreservesNormAndSingularValues) {
  std::mt19937 rng(6);
  const RobotModel m = make_ur5e_like();
  for (int k = 0; k < 100; ++k) {
    const Mat6X J = jacobian(m, JointState::at_rest(random_q(rng, 6)));
    const Mat6X Jh = augmented_jacobian(J, random_base(rng));
    EXPECT_NEAR(Jh.norm(), J.norm(), 1e-12);
    const VecX s0 = Eigen::JacobiSVD<Mat6X>(J).singularValues();
    const VecX s1 = Eigen::JacobiSVD<Mat6X>(Jh).singularValues();
    EXPECT_LT((s0 - s1).cwiseAbs().maxCoeff(), 1e-12);
  }
}

// ---------------------------------------------------------------------------
// Coupling velocity term and task velocity identity
// ---------------------------------------------------------------------------

TEST(CouplingVelocity, ZeroWithoutBaseRotation) {
  std::mt19937 rng(7);
  const RobotModel m = make_ur5e_like();
  BaseState b = random_base(rng);
  b.angular_velocity.setZero();
  EXPECT_EQ(coupling_velocity_term(b, JointState::at_rest(random_q(rng, 6)), m), Vec6::Zero());
}

TEST(CouplingVelocity, CrossProductCase) {
  BaseState b;
  b.angular_velocity = Vec3(0.0, 0.0, 1.0);
  Vec6 expected = Vec6::Zero();
  expected[1] = 1.0;
  EXPECT_LT((coupling_velocity_term(b, Vec3(1.0, 0.0, 0.0)) - expected).norm(), 1e-15);
}

TEST(CouplingVelocity, RotationalPartIsExactlyZero) {
  std::mt19937 rng(8);
  const RobotModel m = make_ur5e_like();
  for (int k = 0; k < 50; ++k) {
    const Vec6 d = coupling_velocity_term(random_base(rng), JointState::at_rest(random_q(rng, 6)), m);
    EXPECT_EQ(d.tail<3>(), Vec3::Zero());
  }
}

TEST(CouplingVelocity, TwistIdentityMatchesPoseDifferences) {
  const RobotModel m = make_ur5e_like();
  double worst = 0.0;
  for (const auto& traj : moving_base_trajectories(6)) {
    for (double t = 0.0; t <= 5.0; t += 0.05) {
      const Sample s = traj(t);
      const Vec6 xd = ee_twist(m, s.joints, s.base);
      worst = std::max(worst, (xd - fd_twist(m, traj, t, 1e-5)).cwiseAbs().maxCoeff());
    }
  }
  EXPECT_LT(worst, 1e-5);
}

TEST(CouplingVelocity, RateMatchesDifferences) {
  const RobotModel m = make_ur5e_like();
  const double h = 1e-5;
  for (const auto& traj : moving_base_trajectories(6)) {
    for (double t = 0.0; t <= 3.0; t += 0.25) {
      const Sample s = traj(t);
      const ChainFrames f = chain_frames(m, s.joints.q);
      const Vec3 pv = jacobian_from_frames(f).topRows<3>() * s.joints.qd;
      const Vec6 dd = coupling_velocity_rate(s.base, s.acc, f.ee.p, pv);
      const Sample a = traj(t + h), b = traj(t - h);
      const Vec6 fd = (coupling_velocity_term(a.base, a.joints, m) - coupling_velocity_term(b.base, b.joints, m)) / (2 * h);
      EXPECT_LT((dd - fd).cwiseAbs().maxCoeff(), 1e-5);
    }
  }
}

// ---------------------------------------------------------------------------
// Jacobian time derivative
// ---------------------------------------------------------------------------

TEST(JacobianRate, ZeroWhenStationary) {
  std::mt19937 rng(9);
  const RobotModel m = make_ur5e_like();
  BaseState b = random_base(rng);
  b.angular_velocity.setZero();
  EXPECT_EQ(jacobian_time_derivative(m, JointState::at_rest(random_q(rng, 6)), b), Mat6X::Zero(6, 6));
}

TEST(JacobianRate, MatchesCentralDifferenceAlongTrajectory) {
  const RobotModel m = make_ur5e_like();
  const double h = 1e-5;
  double worst = 0.0;
  for (const auto& traj : moving_base_trajectories(6)) {
    for (double t = 0.0; t <= 5.0; t += 0.1) {
      const Sample s = traj(t), a = traj(t + h), b = traj(t - h);
      const Mat6X fd = (augmented_jacobian(jacobian(m, a.joints), a.base) -
                        augmented_jacobian(jacobian(m, b.joints), b.base)) /
                       (2 * h);
      worst = std::max(worst, (jacobian_time_derivative(m, s.joints, s.base) - fd).cwiseAbs().maxCoeff());
    }
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(JacobianRate, PureBaseYawProductRule) {
  std::mt19937 rng(10);
  const RobotModel m = make_ur5e_like();
  const JointState js = JointState::at_rest(random_q(rng, 6));
  BaseState b;
  b.R = rot_z(0.7);
  b.angular_velocity = Vec3(0.0, 0.0, 0.8);
  const Mat6X J = jacobian(m, js);
  const Mat3 WR = skew(b.angular_velocity) * b.R;
  const Mat6X expected = block_diag(WR, WR) * J;
  EXPECT_LT((jacobian_time_derivative(m, js, b) - expected).cwiseAbs().maxCoeff(), 1e-14);
}

// ---------------------------------------------------------------------------
// Joint-space dynamics
// ---------------------------------------------------------------------------

TEST(JointDynamics, PendulumClosedForm) {
  const double mass = 2.0, l = 0.7, g = 9.81;
  const RobotModel m = make_planar_arm({l}, {mass}, true);
  for (double q : {-1.0, 0.0, 0.4, 2.0}) {
    VecX qv(1);
    qv << q;
    const auto jm = joint_space_matrices(m, JointState::at_rest(qv));
    EXPECT_NEAR(jm.M(0, 0), mass * l * l, 1e-9);
    EXPECT_NEAR(jm.G[0], mass * g * l * std::cos(q), 1e-9);
  }
}

TEST(JointDynamics, MassMatrixSymmetricPositiveDefinite) {
  std::mt19937 rng(11);
  const RobotModel m = make_ur5e_like();
  for (int k = 0; k < 100; ++k) {
    const MatX M = mass_matrix(m, random_q(rng, 6));
    EXPECT_LT((M - M.transpose()).norm(), 1e-14);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<MatX>(M).eigenvalues().minCoeff(), 0.0);
  }
}

TEST(JointDynamics, MassMatrixMatchesJacobianSum) {
  std::mt19937 rng(12);
  const RobotModel m = make_ur5e_like();
  for (int k = 0; k < 50; ++k) {
    const VecX q = random_q(rng, 6);
    const ChainFrames f = chain_frames(m, q);
    MatX M = MatX::Zero(6, 6);
    for (int l = 0; l < 6; ++l) {
      const Vec3 c = f.link[l].apply(m.links[l].com);
      Mat6X Jc = Mat6X::Zero(6, 6);
      for (int i = 0; i <= l; ++i) Jc.col(i) << f.axis[i].cross(c - f.origin[i]), f.axis[i];
      const Mat3 I = f.link[l].R * m.links[l].inertia * f.link[l].R.transpose();
      M += m.links[l].mass * Jc.topRows<3>().transpose() * Jc.topRows<3>() +
           Jc.bottomRows<3>().transpose() * I * Jc.bottomRows<3>();
    }
    EXPECT_LT((M - mass_matrix(m, q)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(JointDynamics, MassMatrixPartialsMatchDifferences) {
  std::mt19937 rng(13);
  const RobotModel m = make_ur5e_like();
  const VecX q = random_q(rng, 6);
  const auto dM = mass_matrix_partials(arm_spatial(m, chain_frames(m, q)));
  const double h = 1e-6;
  for (int k = 0; k < 6; ++k) {
    VecX qp = q, qm = q;
    qp[k] += h;
    qm[k] -= h;
    const MatX fd = (mass_matrix(m, qp) - mass_matrix(m, qm)) / (2 * h);
    EXPECT_LT((fd - dM[k]).cwiseAbs().maxCoeff(), 1e-8) << "k=" << k;
  }
}

TEST(JointDynamics, SkewSymmetryOfMdotMinusTwoC) {
  std::mt19937 rng(14);
  const RobotModel m = make_ur5e_like();
  double worst = 0.0, worst_matrix = 0.0, worst_fd = 0.0;
  for (int k = 0; k < 200; ++k) {
    const VecX q = random_q(rng, 6);
    const VecX qd = random_q(rng, 6, 2.0);
    const ArmSpatial a = arm_spatial(m, chain_frames(m, q));
    // M_dot from the analytic partials (themselves checked against finite differences above)
    const auto dM = mass_matrix_partials(a);
    MatX Md = MatX::Zero(6, 6);
    for (int i = 0; i < 6; ++i) Md += dM[i] * qd[i];
    const MatX C = coriolis_matrix(a, qd);
    const MatX N = Md - 2 * C;
    worst = std::max(worst, std::abs(qd.dot(N * qd)));
    worst_matrix = std::max(worst_matrix, (N + N.transpose()).cwiseAbs().maxCoeff());
    // independent cross-check: fourth-order central difference of M along qd
    const double h = 5e-4 / qd.norm();
    auto Mq = [&](double s) { return mass_matrix(m, VecX(q + s * qd)); };
    const MatX Mfd = (-Mq(2 * h) + 8 * Mq(h) - 8 * Mq(-h) + Mq(-2 * h)) / (12 * h);
    worst_fd = std::max(worst_fd, (Mfd - Md).cwiseAbs().maxCoeff());
  }
  EXPECT_LT(worst, 1e-10);
  EXPECT_LT(worst_matrix, 1e-10);
  EXPECT_LT(worst_fd, 1e-8);
}

TEST(JointDynamics, ChristoffelMatchesNewtonEuler) {
  std::mt19937 rng(15);
  const RobotModel m = make_ur5e_like();
  for (int k = 0; k < 100; ++k) {
    const VecX q = random_q(rng, 6);
    const VecX qd = random_q(rng, 6, 2.0);
    const VecX qdd = random_q(rng, 6, 3.0);
    const Vec3 g = random_vec3(rng, 10.0);
    const ChainFrames f = chain_frames(m, q);
    const ArmSpatial a = arm_spatial(m, f);
    const VecX expected = mass_matrix(a) * qdd + coriolis_matrix(a, qd) * qd + gravity_vector(a, f, g);
    EXPECT_LT((rnea(a, qd, qdd, g) - expected).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(JointDynamics, GravityIsPotentialGradient) {
  std::mt19937 rng(16);
  const RobotModel m = make_ur5e_like();
  const VecX q = random_q(rng, 6);
  const Vec3 g = m.gravity;
  const auto jm = joint_space_matrices(m, JointState::at_rest(q));
  const double h = 1e-6;
  for (int i = 0; i < 6; ++i) {
    VecX qp = q, qm = q;
    qp[i] += h;
    qm[i] -= h;
    const double dU = (potential_energy(arm_spatial(m, chain_frames(m, qp)), g) -
                       potential_energy(arm_spatial(m, chain_frames(m, qm)), g)) /
                      (2 * h);
    EXPECT_NEAR(jm.G[i], dU, 1e-7);
  }
}

// ---------------------------------------------------------------------------
// Pseudo-inverse and task-space model
// ---------------------------------------------------------------------------

TEST(DampedPseudoInverse, OrthogonalMatrixUndamped) {
  std::mt19937 rng(17);
  Mat6 A;
  for (int i = 0; i < 36; ++i) A(i) = std::uniform_real_distribution<double>(-1, 1)(rng);
  const Mat6 Q = Eigen::HouseholderQR<Mat6>(A).householderQ();
  const PseudoInverse P = damped_pseudoinverse(Mat6X(Q), 0.0);
  EXPECT_LT((P.pinv - MatX6(Q.transpose())).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(DampedPseudoInverse, PenroseConditionUndamped) {
  std::mt19937 rng(18);
  for (int n : {6, 7}) {
    Mat6X J(6, n);
    for (int i = 0; i < J.size(); ++i) J(i) = std::uniform_real_distribution<double>(-1, 1)(rng);
    const PseudoInverse P = damped_pseudoinverse(J, 0.0);
    EXPECT_LT((J * P.pinv * J - J).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(DampedPseudoInverse, MatchesNormalEquationForm) {
  std::mt19937 rng(19);
  Mat6X J(6, 6);
  for (int i = 0; i < J.size(); ++i) J(i) = std::uniform_real_distribution<double>(-1, 1)(rng);
  const double lambda = 0.05;
  const Mat6 JJt = J * J.transpose() + lambda * lambda * Mat6::Identity();
  const MatX6 expected = J.transpose() * JJt.inverse();
  EXPECT_LT((damped_pseudoinverse(J, lambda).pinv - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(DampedPseudoInverse, RankDeficientStaysBounded) {
  std::mt19937 rng(20);
  Mat6X J(6, 6);
  for (int i = 0; i < J.size(); ++i) J(i) = std::uniform_real_distribution<double>(-1, 1)(rng);
  J.col(5) = J.col(4);
  J.row(2) = 2.0 * J.row(1);
  const double lambda = 0.01;
  const PseudoInverse P = damped_pseudoinverse(J, lambda);
  EXPECT_TRUE(P.pinv.allFinite());
  EXPECT_TRUE(P.near_singular);
  // each damped gain s / (s^2 + l^2) is at most 1 / (2 l)
  EXPECT_LE(Eigen::JacobiSVD<MatX6>(P.pinv).singularValues()[0], 1.0 / (2 * lambda) + 1e-9);
}

TEST(TaskSpace, MassMatchesDirectInverse) {
  std::mt19937 rng(21);
  const RobotModel m = make_ur5e_like();
  int checked = 0;
  while (checked < 50) {
    const VecX q = random_q(rng, 6);
    const JointState js(q, random_q(rng, 6, 1.0));
    const BaseState b = random_base(rng);
    const Mat6X Jh = augmented_jacobian(jacobian(m, js), b);
    if (Eigen::JacobiSVD<Mat6X>(Jh).singularValues()[5] < 0.05) continue;
    const auto jm = joint_space_matrices(m, js);
    const Mat6X Jhd = jacobian_time_derivative(m, js, b);
    const TaskMatrices t = task_space_matrices(jm.M, jm.C, jm.G, Jh, Jhd, 0.0);
    const Mat6 Jinv = Mat6(Jh).inverse();
    const Mat6 M0 = Jinv.transpose() * Mat6(jm.M) * Jinv;
    EXPECT_LT((t.M0 - M0).cwiseAbs().maxCoeff(), 1e-8 * (1.0 + M0.cwiseAbs().maxCoeff()));
    EXPECT_LT((t.M0 - t.M0.transpose()).cwiseAbs().maxCoeff(), 1e-9);
    ++checked;
  }
}

TEST(TaskSpace, RateTermVanishesAtRestWithStationaryBase) {
  std::mt19937 rng(22);
  const RobotModel m = make_ur5e_like();
  BaseState b = random_base(rng);
  b.angular_velocity.setZero();
  const TaskState s = compute_task_state(m, JointState::at_rest(random_q(rng, 6)), b);
  EXPECT_EQ(s.Jh_dot, Mat6X::Zero(6, 6));
  EXPECT_EQ(s.task.C0, Mat6::Zero());
}

TEST(TaskSpace, KineticEnergyEquivalence) {
  std::mt19937 rng(23);
  const RobotModel m = make_ur5e_like();
  int checked = 0;
  double worst = 0.0;
  while (checked < 200) {
    const JointState js(random_q(rng, 6), random_q(rng, 6, 1.5));
    const BaseState b = random_base(rng);
    const TaskState s = compute_task_state(m, js, b, 0.0);
    if (s.task.sigma_min < 0.05) continue;
    const Vec6 xr = s.Jh * js.qd;
    const double Ek = kinetic_energy(s.joint.M, js.qd);
    worst = std::max(worst, std::abs(0.5 * xr.dot(s.task.M0 * xr) - Ek) / std::max(1.0, Ek));
    ++checked;
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(TaskSpace, NearSingularFlagRaisedAtStretchedArm) {
  const RobotModel m = make_ur5e_like();
  const TaskState s = compute_task_state(m, JointState::at_rest(VecX::Zero(6)), BaseState{});
  EXPECT_TRUE(s.task.near_singular);
  EXPECT_TRUE(s.task.M0.allFinite());
  EXPECT_TRUE(s.task.C0.allFinite());
}

TEST(CouplingWrench, ZeroForStationaryBase) {
  std::mt19937 rng(24);
  const RobotModel m = make_ur5e_like();
  BaseState b = random_base(rng);
  b.linear_velocity.setZero();
  b.angular_velocity.setZero();
  const JointState js(random_q(rng, 6), random_q(rng, 6, 1.0));
  const TaskState s = compute_task_state(m, js, b);
  const Wrench mu = coupling_wrench(s.task.M0, s.task.C0, b, s.d, Vec6::Zero(), BaseAcceleration{});
  EXPECT_EQ(mu.value, Vec6::Zero());
  EXPECT_EQ(mu.frame, Frame::inertial);
}

// ---------------------------------------------------------------------------
// Model validation and serialization
// ---------------------------------------------------------------------------

TEST(RobotModelJson, RoundTripPreservesDynamics) {
  const RobotModel m = make_ur5e_like();
  const RobotModel r = robot_model_from_json(nlohmann::json::parse(robot_model_to_json(m).dump()));
  std::mt19937 rng(25);
  const VecX q = random_q(rng, 6);
  EXPECT_LT((mass_matrix(m, q) - mass_matrix(r, q)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((ee_pose_in_base(m, q).p - ee_pose_in_base(r, q).p).norm(), 1e-12);
  EXPECT_EQ(r.friction.size(), 6u);
  EXPECT_DOUBLE_EQ(r.friction[0].coulomb, m.friction[0].coulomb);
}

TEST(RobotModelJson, RejectsInvalidFieldsByName) {
  auto j = robot_model_to_json(make_ur5e_like());
  j["links"][2]["mass"] = -1.0;
  try {
    (void)robot_model_from_json(j);
    FAIL() << "expected rejection";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("links[2].mass"), std::string::npos) << e.what();
  }
  auto k = robot_model_to_json(make_ur5e_like());
  k["links"][0]["axis"] = {0.0, 0.0, 2.0};
  EXPECT_THROW((void)robot_model_from_json(k), std::invalid_argument);
}

TEST(RobotModel, RejectsSingleLink) {
  EXPECT_THROW(make_planar_arm({1.0}, {1.0}).validate(), std::invalid_argument);
  EXPECT_NO_THROW(make_planar_arm({1.0, 1.0}, {1.0, 1.0}).validate());
  EXPECT_NO_THROW(make_ur5e_like().validate());
}

TEST(RobotModel, PayloadConservesMassAndMoment) {
  const RobotModel m = make_ur5e_like();
  const RobotModel p = m.with_payload(0.5, Vec3(0.0, 0.0, 0.05));
  EXPECT_NEAR(p.total_mass(), m.total_mass() + 0.5, 1e-12);
  const Vec3 c_expected = (m.links[5].mass * m.links[5].com + 0.5 * m.tool.apply(Vec3(0, 0, 0.05))) / p.links[5].mass;
  EXPECT_LT((p.links[5].com - c_expected).norm(), 1e-12);
  EXPECT_NO_THROW(p.validate());
}
