/**
 * @file plant.hpp
 * @brief Forward dynamics of the arm on a prescribed moving base, with wall contact.
 *
 * M_q(q) qdd + C_q qd + G_q = tau + Jh^T (f_e + f_d) + friction. The smooth part is advanced
 * by RK4 or semi-implicit Euler; the stiff smoothed-Coulomb friction is then applied as an
 * implicit velocity correction that minimizes a convex incremental potential.
 */
#pragma once

#include "mmude/core/types.hpp"
#include "mmude/kinodyn/dynamics.hpp"
#include "mmude/kinodyn/kinematics.hpp"
#include "mmude/kinodyn/robot_model.hpp"
#include "mmude/sim/scenario_config.hpp"
#include "mmude/world/base_trajectory.hpp"
#include "mmude/world/friction.hpp"
#include "mmude/world/wall.hpp"

#include <functional>
#include <optional>

namespace mmude {

struct PlantState {
  VecX q;
  VecX qd;

  [[nodiscard]] bool finite() const { return q.allFinite() && qd.allFinite(); }
  [[nodiscard]] JointState joints() const { return {q, qd}; }
};

/// Kinematic quantities and the contact wrench at one state.
struct PlantKinematics {
  Pose ee;                     // {i}
  Vec6 ee_twist = Vec6::Zero();
  Mat6X Jh;
  Wrench f_e = Wrench::zero();
  ContactState contact;
};

class Plant {
 public:
  Plant(RobotModel model, std::optional<WallModel> wall, Integrator integrator = Integrator::rk4)
      : model_(std::move(model)), wall_(std::move(wall)), integrator_(integrator) {
    model_.validate();
    friction_ = has_friction(model_);
  }

  [[nodiscard]] const RobotModel& model() const { return model_; }
  [[nodiscard]] const std::optional<WallModel>& wall() const { return wall_; }

  [[nodiscard]] PlantKinematics sense(const PlantState& s, const BaseState& base) const {
    return kinematics(chain_frames(model_, s.q), s.qd, base);
  }

  /// Smooth joint acceleration (friction excluded) at a state.
  [[nodiscard]] VecX acceleration(const PlantState& s, const VecX& tau, const BaseState& base, const Vec6& f_d) const {
    const ChainFrames f = chain_frames(model_, s.q);
    const PlantKinematics k = kinematics(f, s.qd, base);
    const ArmSpatial a = arm_spatial(model_, f);
    const MatX M = mass_matrix(a);
    const VecX bias = rnea(a, s.qd, VecX::Zero(s.qd.size()), gravity_in_base(model_, base));
    const VecX rhs = tau + k.Jh.transpose() * (k.f_e.value + f_d) - bias;
    return M.ldlt().solve(rhs);
  }

  /// Advances one physics step from time t. `f_d` gives the injected end-effector wrench.
  [[nodiscard]] PlantState step(const PlantState& s, const VecX& tau, const BaseTrajectory& traj, double t, double dt,
                                const std::function<Vec6(double)>& f_d) const {
    PlantState out;
    if (integrator_ == Integrator::semi_implicit_euler) {
      const VecX qdd = acceleration(s, tau, base_state_at(traj, t).state, f_d(t));
      VecX v = s.qd + dt * qdd;
      if (friction_) v += friction_correction(s.q, v, dt);
      out.q = s.q + dt * v;
      out.qd = v;
      return out;
    }
    auto deriv = [&](const PlantState& x, double tt, VecX& dq, VecX& dv) {
      dq = x.qd;
      dv = acceleration(x, tau, base_state_at(traj, tt).state, f_d(tt));
    };
    VecX k1q, k1v, k2q, k2v, k3q, k3v, k4q, k4v;
    deriv(s, t, k1q, k1v);
    deriv({s.q + 0.5 * dt * k1q, s.qd + 0.5 * dt * k1v}, t + 0.5 * dt, k2q, k2v);
    deriv({s.q + 0.5 * dt * k2q, s.qd + 0.5 * dt * k2v}, t + 0.5 * dt, k3q, k3v);
    deriv({s.q + dt * k3q, s.qd + dt * k3v}, t + dt, k4q, k4v);
    out.q = s.q + dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    out.qd = s.qd + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    if (friction_) {
      const VecX dv = friction_correction(out.q, out.qd, dt);
      out.qd += dv;
      out.q += dt * dv;
    }
    return out;
  }

  /// Velocity change dv minimizing 1/2 dv^T M dv + dt sum Psi(v + dv), i.e. M dv = dt friction(v + dv).
  [[nodiscard]] VecX friction_correction(const VecX& q, const VecX& v, double dt) const {
    const MatX M = mass_matrix(model_, q);
    const int n = static_cast<int>(v.size());
    auto objective = [&](const VecX& dv) {
      double phi = 0.5 * dv.dot(M * dv);
      for (int i = 0; i < n; ++i) phi += dt * friction_potential(model_.friction[i], v[i] + dv[i]);
      return phi;
    };
    VecX dv = VecX::Zero(n);
    double phi = objective(dv);
    for (int it = 0; it < 50; ++it) {
      VecX g = M * dv;
      MatX H = M;
      const VecX fr = joint_friction(model_, v + dv);
      for (int i = 0; i < n; ++i) {
        g[i] -= dt * fr[i];
        H(i, i) += dt * friction_slope(model_.friction[i], v[i] + dv[i]);
      }
      if (g.norm() < 1e-13) break;
      const VecX step = -H.ldlt().solve(g);
      double alpha = 1.0;
      VecX trial = dv + step;
      double phi_trial = objective(trial);
      while (phi_trial > phi + 1e-4 * alpha * g.dot(step) && alpha > 1e-8) {
        alpha *= 0.5;
        trial = dv + alpha * step;
        phi_trial = objective(trial);
      }
      dv = trial;
      const bool converged = (alpha * step).cwiseAbs().maxCoeff() < 1e-14;
      phi = phi_trial;
      if (converged) break;
    }
    return dv;
  }

 private:
  [[nodiscard]] PlantKinematics kinematics(const ChainFrames& f, const VecX& qd, const BaseState& base) const {
    PlantKinematics k;
    k.ee = {base.R * f.ee.R, base.position + base.R * f.ee.p};
    k.Jh = augmented_jacobian(jacobian_from_frames(f), base);
    k.ee_twist = k.Jh * qd + base.twist() + coupling_velocity_term(base, f.ee.p);
    if (wall_) {
      k.contact = contact(*wall_, k.ee.p, k.ee_twist.head<3>());
      k.f_e.value.head<3>() = k.contact.force;
    }
    return k;
  }

  RobotModel model_;
  std::optional<WallModel> wall_;
  Integrator integrator_;
  bool friction_ = false;
};

}  // namespace mmude
