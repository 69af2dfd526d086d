/**
 * @file inverse_kinematics.hpp
 * @brief Damped least-squares pose inverse kinematics used to place scenario start poses.
 */
#pragma once

#include "mmude/core/rotation.hpp"
#include "mmude/core/types.hpp"
#include "mmude/kinodyn/kinematics.hpp"
#include "mmude/kinodyn/robot_model.hpp"

#include <stdexcept>

namespace mmude {

struct IkResult {
  VecX q;
  double residual = 0.0;  // norm of [position error; rotation log]
  int iterations = 0;
};

/// Solves for joints placing the tool at `target` (in {i}) given the base pose, starting at `seed`.
inline IkResult inverse_kinematics(const RobotModel& model, const BaseState& base, const Pose& target, VecX seed,
                                   int max_iterations = 500, double tolerance = 1e-12) {
  IkResult r;
  r.q = std::move(seed);
  constexpr double kLambda = 1e-2;
  for (r.iterations = 0; r.iterations < max_iterations; ++r.iterations) {
    const JointState j = JointState::at_rest(r.q);
    const Pose x = forward_kinematics(model, j, base);
    Vec6 e;
    e << target.p - x.p, so3_log(target.R * x.R.transpose());
    r.residual = e.norm();
    if (r.residual < tolerance) break;
    const Mat6X Jh = augmented_jacobian(jacobian(model, j), base);
    const Mat6 A = Jh * Jh.transpose() + kLambda * kLambda * Mat6::Identity();
    VecX dq = Jh.transpose() * A.ldlt().solve(e);
    const double step = dq.cwiseAbs().maxCoeff();
    if (step > 0.2) dq *= 0.2 / step;
    r.q += dq;
  }
  return r;
}

inline VecX inverse_kinematics_or_throw(const RobotModel& model, const BaseState& base, const Pose& target,
                                        const VecX& seed, const char* where) {
  const IkResult r = inverse_kinematics(model, base, target, seed);
  if (!(r.residual < 1e-9)) {
    throw std::invalid_argument(std::string(where) + ": start pose is unreachable (residual " +
                                std::to_string(r.residual) + ")");
  }
  return r.q;
}

}  // namespace mmude
