/**
 * @file controller.hpp
 * @brief Task-space impedance controllers C1-C4 with optional UDE compensation.
 *
 *  C1  feedback linearization + coupling feedforward from base velocity + UDE feedback
 *  C2  feedback linearization + UDE feedback on the coupled (inertial) task velocity
 *  C3  as C2 but the model and the UDE see only the arm motion relative to the base
 *  C4  feedback linearization + impedance law, no estimator
 *
 * Every law consumes positions and velocities only; no measured acceleration enters.
 */
#pragma once

#include "mmude/control/impedance.hpp"
#include "mmude/core/types.hpp"
#include "mmude/kinodyn/dynamics.hpp"
#include "mmude/kinodyn/kinematics.hpp"
#include "mmude/kinodyn/robot_model.hpp"
#include "mmude/sigproc/ude_filters.hpp"

#include <array>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace mmude {

enum class ControllerKind { C1, C2, C3, C4 };

inline const char* to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::C1: return "C1";
    case ControllerKind::C2: return "C2";
    case ControllerKind::C3: return "C3";
    case ControllerKind::C4: return "C4";
  }
  return "?";
}

inline std::optional<ControllerKind> controller_kind_from_string(const std::string& s) {
  if (s == "C1") return ControllerKind::C1;
  if (s == "C2") return ControllerKind::C2;
  if (s == "C3") return ControllerKind::C3;
  if (s == "C4") return ControllerKind::C4;
  return std::nullopt;
}

enum class TorqueClamp {
  total,             // |tau_i| <= limit_i
  excluding_gravity  // |tau_i - G_i| <= limit_i, gravity torque passes unclamped
};

struct ControllerConfig {
  ControllerKind kind = ControllerKind::C1;
  ImpedanceParams gains = ImpedanceParams::simulation_defaults();
  TransferFunction gf1 = lowpass_gf1();
  std::array<double, 6> cutoffs = kDefaultCutoffs;
  Discretization coupling_discretization = Discretization::triangle_hold;
  double Ts = 0.008;
  double damping = kDefaultDamping;
  VecX torque_limit;  // empty: unlimited
  TorqueClamp clamp = TorqueClamp::excluding_gravity;
  bool anti_windup = true;

  [[nodiscard]] bool uses_ude() const { return kind != ControllerKind::C4; }
};

/// Measured signals available to the controller at one tick.
struct ControlInput {
  JointState joints;
  BaseState base;
  Wrench f_e = Wrench::zero(Frame::inertial);  // measured contact wrench on the end effector
  ControlTarget target;
};

struct ControlOutput {
  VecX tau;
  Vec6 f = Vec6::Zero();        // commanded task wrench
  Vec6 f_c = Vec6::Zero();      // feedforward part
  Vec6 f_u = Vec6::Zero();      // feedback part
  Vec6 v = Vec6::Zero();        // desired impedance wrench
  Vec6 mu_hat = Vec6::Zero();   // lumped disturbance estimate v - f_u
  Vec6 kf_term = Vec6::Zero();  // K_f e_f
  ImpedanceErrors err;
  Pose x;
  Vec6 x_dot = Vec6::Zero();
  Mat6 M0 = Mat6::Zero();
  std::array<bool, kMaxDof> saturated{};
  bool any_saturated = false;
  bool near_singular = false;
  bool failed = false;
};

class Controller {
 public:
  Controller(RobotModel model, ControllerConfig cfg) : model_(std::move(model)), cfg_(std::move(cfg)) {
    model_.validate();
    cfg_.gains.validate();
    if (cfg_.torque_limit.size() != 0 && cfg_.torque_limit.size() != model_.dof()) {
      throw std::invalid_argument("controller.torque_limit: expected " + std::to_string(model_.dof()) + " entries");
    }
    filters_ = make_filters(cfg_.gf1, cfg_.cutoffs, cfg_.Ts, cfg_.coupling_discretization);
  }

  [[nodiscard]] const ControllerConfig& config() const { return cfg_; }
  [[nodiscard]] const RobotModel& model() const { return model_; }
  [[nodiscard]] const UdeFilters& filters() const { return filters_; }

  void reset() {
    filters_.gf1_bank.reset();
    filters_.sgf1_bank.reset();
    filters_.gf2_bank.reset();
    filters_.composite.reset();
  }

  /// Task state as the controller perceives it.
  [[nodiscard]] TaskState perceive(const JointState& joints, const BaseState& base) const {
    return compute_task_state(model_, joints, base, cfg_.damping, cfg_.kind != ControllerKind::C3);
  }

  /// -sG_f1 * M0 (eta_dot + d) - G_f1 * C0 (eta_dot + d); advances the coupling filters.
  Vec6 coupling_feedforward(const Mat6& M0, const Mat6& C0, const BaseState& base, const Vec6& d) {
    const Vec6 nu = base.twist() + d;
    return -filters_.sgf1_bank.step(M0 * nu) - filters_.gf1_bank.step(C0 * nu);
  }

  /// [1/(1 - G_f2)] v - [sG_f2/(1 - G_f2)] p without advancing state; p is M0 x_dot.
  [[nodiscard]] Vec6 feedback_preview(const Vec6& v, const Vec6& p) const {
    return filters_.composite.integral_preview(v) - filters_.composite.proportional_preview(p);
  }

  void feedback_commit(const Vec6& v, const Vec6& p, bool freeze) {
    filters_.composite.integral_advance(v, freeze);
    filters_.composite.proportional_advance(p);
  }

  ControlOutput step(const ControlInput& in) {
    require_frame(in.f_e, Frame::inertial, "controller");
    ControlOutput out;
    const int n = model_.dof();
    const TaskState s = perceive(in.joints, in.base);
    const Mat6& M0 = s.task.M0;
    const Mat6& C0 = s.task.C0;
    out.x = s.pose;
    out.x_dot = s.xdot;
    out.M0 = M0;
    out.near_singular = s.task.near_singular;

    out.err = impedance_error(s.pose, s.xdot, in.target, in.f_e);
    const ImpedanceParams& g = cfg_.gains;
    out.kf_term = g.effective_kf(in.target.mode).cwiseProduct(out.err.e_f);
    out.v = M0 * in.target.xd_ddot - g.Cd.cwiseProduct(out.err.e_dot) - g.Kd.cwiseProduct(out.err.e) + out.kf_term;

    // desired-velocity feedforward in the coordinates the model is written in
    Vec6 xd_model = in.target.xd_dot;
    if (cfg_.kind == ControllerKind::C3) xd_model -= in.base.twist() + s.d;
    const Vec6 linearization = C0 * xd_model + s.task.G0 - in.f_e.value;

    out.f_c = linearization;
    if (cfg_.kind == ControllerKind::C1) out.f_c += coupling_feedforward(M0, C0, in.base, s.d);

    Vec6 p = Vec6::Zero();
    if (cfg_.uses_ude()) {
      // C3 sees only the arm's own motion; C1/C2 use the coupled inertial velocity
      p = cfg_.kind == ControllerKind::C3 ? Vec6(M0 * (s.Jh * in.joints.qd)) : Vec6(M0 * s.xdot);
      out.f_u = feedback_preview(out.v, p);
    } else {
      out.f_u = out.v;
    }
    out.mu_hat = out.v - out.f_u;
    out.f = out.f_c + out.f_u;

    // gravity is mapped in joint space so the pseudo-inverse damping cannot bias the equilibrium
    out.tau = s.Jh.transpose() * (out.f - s.task.G0) + s.joint.G;
    if (!out.f.allFinite() || !out.tau.allFinite() || !s.xdot.allFinite()) {
      out.failed = true;
      out.tau = VecX::Zero(n);
      return out;
    }
    if (cfg_.torque_limit.size() == n) {
      const VecX offset = cfg_.clamp == TorqueClamp::excluding_gravity ? s.joint.G : VecX::Zero(n);
      for (int i = 0; i < n; ++i) {
        const double lim = cfg_.torque_limit[i];
        const double rel = out.tau[i] - offset[i];
        if (std::abs(rel) > lim) {
          out.tau[i] = offset[i] + std::copysign(lim, rel);
          out.saturated[i] = true;
          out.any_saturated = true;
        }
      }
    }
    if (cfg_.uses_ude()) feedback_commit(out.v, p, cfg_.anti_windup && out.any_saturated);
    return out;
  }

 private:
  RobotModel model_;
  ControllerConfig cfg_;
  UdeFilters filters_;
};

}  // namespace mmude
