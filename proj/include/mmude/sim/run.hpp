/**
 * @file run.hpp
 * @brief Closed-loop scenario execution: plant at the physics rate, controller at the control
 * rate with zero-order hold, scheduled motion/force targets, and per-tick logging.
 */
#pragma once

#include "mmude/bench/metrics.hpp"
#include "mmude/control/controller.hpp"
#include "mmude/control/stability.hpp"
#include "mmude/core/rotation.hpp"
#include "mmude/kinodyn/dynamics.hpp"
#include "mmude/kinodyn/inverse_kinematics.hpp"
#include "mmude/sim/plant.hpp"
#include "mmude/sim/scenario_config.hpp"
#include "mmude/world/base_trajectory.hpp"
#include "mmude/world/sensors.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace mmude {

enum class RunStatus { ok, nonconformant, failed };

inline const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::ok: return "OK";
    case RunStatus::nonconformant: return "NONCONFORMANT";
    case RunStatus::failed: return "FAILED";
  }
  return "?";
}

/// One control tick. Pose vectors are position followed by Z-Y-X Euler angles.
struct RunRow {
  double t = 0.0;
  VecX q, qd, tau;
  Vec6 x = Vec6::Zero(), x_dot = Vec6::Zero(), x_d = Vec6::Zero();
  Vec6 e = Vec6::Zero();  // true pose error (rotation-log orientation part)
  Vec6 eta = Vec6::Zero(), eta_dot = Vec6::Zero();
  Vec6 f_e = Vec6::Zero(), f_e_measured = Vec6::Zero(), f_ed = Vec6::Zero();
  Vec6 f = Vec6::Zero(), f_c = Vec6::Zero(), f_u = Vec6::Zero(), kf_term = Vec6::Zero();
  Vec6 mu_c = Vec6::Zero(), interface = Vec6::Zero();
  double V = 0.0, margin = 0.0;
  int force_axes = 0;  // bit i set when axis i is force controlled
  int saturated = 0;   // bit i set when joint i hit its limit
  bool near_singular = false;
};

struct RunRecord {
  std::string name;
  std::string controller;
  std::uint64_t seed = 0;
  int dof = 0;
  RunStatus status = RunStatus::ok;
  long failure_tick = -1;
  std::string failure_reason;
  std::vector<RunRow> rows;
  double min_margin = 0.0;
  bool nonconformant = false;
  Vec6 delta_u = Vec6::Zero();
  int saturation_steps = 0;
  int force_axis = -1;

  [[nodiscard]] std::vector<double> time() const {
    std::vector<double> t;
    t.reserve(rows.size());
    for (const auto& r : rows) t.push_back(r.t);
    return t;
  }

  /// Pushing force minus desired pushing force along the force axis.
  [[nodiscard]] std::vector<double> force_error() const {
    std::vector<double> e;
    e.reserve(rows.size());
    for (const auto& r : rows) e.push_back(force_axis < 0 ? 0.0 : -(r.f_e[force_axis] - r.f_ed[force_axis]));
    return e;
  }

  [[nodiscard]] std::vector<double> pose_error(int axis) const {
    std::vector<double> e;
    e.reserve(rows.size());
    for (const auto& r : rows) e.push_back(r.e[axis]);
    return e;
  }
};

namespace detail {

struct Profile {
  double p = 0.0, v = 0.0, a = 0.0;
};

inline Profile min_jerk(double from, double to, double t0, double duration, double t) {
  const double u = (t - t0) / duration;
  if (u <= 0.0) return {from, 0.0, 0.0};
  if (u >= 1.0) return {to, 0.0, 0.0};
  const double d = to - from;
  const double u2 = u * u, u3 = u2 * u;
  return {from + d * u3 * (10.0 - 15.0 * u + 6.0 * u2), d * 30.0 * u2 * (1.0 - u) * (1.0 - u) / duration,
          d * 60.0 * u * (1.0 - 3.0 * u + 2.0 * u2) / (duration * duration)};
}

inline double force_setpoint(const ForcePhase& f, double t) {
  double value = 0.0;
  for (const auto& r : f.ramps) {
    if (t >= r.end) {
      value = r.value;
    } else if (t >= r.start) {
      const double s = r.end > r.start ? (t - r.start) / (r.end - r.start) : 1.0;
      return value + s * (r.value - value);
    } else {
      break;
    }
  }
  return value;
}

inline Vec6 pose_vector(const Pose& p) {
  Vec6 v;
  v << p.p, euler_zyx_from_rotation(p.R);
  return v;
}

}  // namespace detail

/// Scheduled target: hold the start pose, approach the wall, regulate force while wiping,
/// then retract under full motion control.
inline ControlTarget scenario_target(const ScenarioConfig& cfg, const Pose& start, const BaseSample& base,
                                     double base_x0, double t) {
  const TaskSchedule& task = cfg.task;
  ControlTarget tg;
  tg.x_d = start;
  if (task.follow_base_x) {
    tg.x_d.p[0] += base.state.position[0] - base_x0;
    tg.xd_dot[0] = base.state.linear_velocity[0];
    tg.xd_ddot[0] = base.acc.linear[0];
  }
  const int ax = task.force ? task.force->axis : 1;
  if (task.approach && ax < 3) {
    const Approach& a = *task.approach;
    detail::Profile pr = detail::min_jerk(start.p[ax], a.target, a.start, a.duration, t);
    if (task.force && t >= task.force->mode_end)
      pr = detail::min_jerk(a.target, start.p[ax], task.force->mode_end, task.retract_duration, t);
    tg.x_d.p[ax] = pr.p;
    tg.xd_dot[ax] = pr.v;
    tg.xd_ddot[ax] = pr.a;
  }
  if (task.sine && t >= task.sine->start && t < task.sine->end && task.sine->axis < 3) {
    const SineSegment& s = *task.sine;
    const double ph = s.omega * (t - s.start);
    tg.x_d.p[s.axis] += s.amplitude * std::sin(ph);
    tg.xd_dot[s.axis] += s.amplitude * s.omega * std::cos(ph);
    tg.xd_ddot[s.axis] -= s.amplitude * s.omega * s.omega * std::sin(ph);
  }
  if (task.force && t >= task.force->mode_start && t < task.force->mode_end) {
    const int f = task.force->axis;
    tg.mode[f] = AxisMode::force;
    const double sign = (cfg.wall && f < 3) ? cfg.wall->normal[f] : -1.0;
    tg.f_ed.value[f] = sign * detail::force_setpoint(*task.force, t);
  }
  return tg;
}

/// Joint configuration at which the run starts (at rest), including the seeded perturbation.
inline VecX scenario_initial_joints(const ScenarioConfig& cfg, const Pose& start) {
  const BaseSample b0 = base_state_at(cfg.base, 0.0);
  Pose perturbed = start;
  if (cfg.task.initial_perturbation > 0.0) {
    std::mt19937_64 rng(cfg.seed * 0x9E3779B97F4A7C15ULL + 17);
    std::uniform_real_distribution<double> u(-cfg.task.initial_perturbation, cfg.task.initial_perturbation);
    for (int i = 0; i < 3; ++i) perturbed.p[i] += u(rng);
  }
  return inverse_kinematics_or_throw(cfg.robot, b0.state, perturbed, cfg.task.ik_seed, "task.start_position");
}

inline Pose scenario_start_pose(const ScenarioConfig& cfg) {
  return {rotation_from_euler_zyx(cfg.task.start_rpy), cfg.task.start_position};
}

/// Coupling wrench predicted by the model from analytic base motion, and the wrench seen by an
/// ideal base-arm interface sensor reconstructed from the realized end-effector motion.
struct CouplingSample {
  Vec6 predicted = Vec6::Zero();
  Vec6 measured = Vec6::Zero();
};

inline CouplingSample coupling_sample(const RobotModel& plant_model, const PlantState& s, const BaseSample& base,
                                      const Vec6& xdd_realized, const VecX& tau_applied, const Vec6& f_e,
                                      double damping) {
  const TaskState ts = compute_task_state(plant_model, s.joints(), base.state, damping);
  const Vec6 d_dot = coupling_velocity_rate(base.state, base.acc, ts.ee_in_base, ts.ee_vel_in_base);
  CouplingSample c;
  c.predicted = coupling_wrench(ts.task.M0, ts.task.C0, base.state, ts.d, d_dot, base.acc).value;
  c.measured = ts.task.M0 * xdd_realized + ts.task.C0 * ts.xdot + ts.task.G0 -
               ts.task.Jpinv.transpose() * tau_applied - f_e;
  return c;
}

/// Offset used to evaluate the task schedule just before a control tick.
inline constexpr double kLeftLimit = 1e-9;

/// Called once per physics tick with the torque applied over that tick.
using PhysicsObserver = std::function<void(long tick, const VecX& tau)>;

/// Runs one scenario. Identical configuration and seed give bitwise-identical records.
inline RunRecord run_scenario(const ScenarioConfig& cfg, const PhysicsObserver& observe = {}) {
  cfg.validate();
  RunRecord rec;
  rec.name = cfg.name;
  rec.seed = cfg.seed;
  rec.dof = cfg.robot.dof();
  rec.controller = cfg.coupling.enabled ? "joint_pd" : to_string(cfg.controller.kind);
  rec.force_axis = cfg.task.force ? cfg.task.force->axis : -1;

  const RobotModel plant_model = cfg.plant_model();
  const Plant plant(plant_model, cfg.wall, cfg.integrator);
  Controller controller(cfg.robot, cfg.controller);
  StabilityMonitor monitor(cfg.controller.gains);
  const double dt = cfg.clock.physics_dt;
  const int ratio = cfg.clock.ratio();
  const long ticks = cfg.clock.physics_ticks();

  WrenchSensor ft(cfg.sensors.force_torque, dt, cfg.seed * 2654435761ULL + 1);
  WrenchSensor iface(cfg.sensors.interface, dt, cfg.seed * 2654435761ULL + 2);

  const Pose start = scenario_start_pose(cfg);
  PlantState s;
  s.q = cfg.coupling.enabled ? cfg.coupling.joints : scenario_initial_joints(cfg, start);
  s.qd = VecX::Zero(rec.dof);
  const double base_x0 = base_state_at(cfg.base, 0.0).state.position[0];

  VecX tau = VecX::Zero(rec.dof);
  VecX tau_prev = tau;
  Vec6 prev_twist = Vec6::Zero();
  bool have_prev = false;
  auto f_d = [&](double t) { return cfg.disturbance.at(t); };
  rec.rows.reserve(static_cast<std::size_t>(ticks / ratio + 2));

  // joint regulation with nominal gravity compensation, run at the physics rate
  auto joint_regulation = [&](const PlantState& x) -> VecX {
    const JointState meas{quantize(x.q, cfg.sensors.encoders), x.qd};
    const VecX g = joint_space_matrices(cfg.robot, JointState::at_rest(meas.q)).G;
    return g + cfg.coupling.kp.head(rec.dof).cwiseProduct(cfg.coupling.joints - meas.q) -
           cfg.coupling.kd.head(rec.dof).cwiseProduct(meas.qd);
  };

  for (long k = 0; k <= ticks; ++k) {
    const double t = static_cast<double>(k) * dt;
    const BaseSample base = base_state_at(cfg.base, t);
    const PlantKinematics kin = plant.sense(s, base.state);
    const Wrench fe_meas = ft.sample(kin.f_e, k);
    const Vec6 xdd = have_prev ? Vec6((kin.ee_twist - prev_twist) / dt) : Vec6::Zero();

    if (k % ratio == 0) {
      RunRow row;
      row.t = t;
      row.q = s.q;
      row.qd = s.qd;
      row.x = detail::pose_vector(kin.ee);
      row.x_dot = kin.ee_twist;
      row.eta = base.pose_vector();
      row.eta_dot = base.state.twist();
      row.f_e = kin.f_e.value;
      row.f_e_measured = fe_meas.value;

      const CouplingSample cs = coupling_sample(plant_model, s, base, xdd, tau_prev, kin.f_e.value, cfg.controller.damping);
      row.mu_c = cs.predicted;
      row.interface = iface.sample(Wrench(cs.measured, Frame::inertial), k).value;

      const ControlTarget target = scenario_target(cfg, start, base, base_x0, t);
      row.x_d = detail::pose_vector(target.x_d);
      row.f_ed = target.f_ed.value;
      for (int i = 0; i < 6; ++i)
        if (target.mode[i] == AxisMode::force) row.force_axes |= 1 << i;
      row.e = impedance_error(kin.ee, kin.ee_twist, target, kin.f_e).e;

      bool failed = false;
      if (cfg.coupling.enabled) {
        tau = joint_regulation(s);
        failed = !tau.allFinite();
      } else {
        ControlInput in;
        in.joints = {quantize(s.q, cfg.sensors.encoders), s.qd};
        in.base = base.state;
        in.f_e = fe_meas;
        in.target = target;
        const ControlOutput out = controller.step(in);
        tau = out.tau;
        failed = out.failed;
        row.f = out.f;
        row.f_c = out.f_c;
        row.f_u = out.f_u;
        row.kf_term = out.kf_term;
        row.near_singular = out.near_singular;
        for (int i = 0; i < rec.dof; ++i)
          if (out.saturated[i]) row.saturated |= 1 << i;
        if (out.any_saturated) ++rec.saturation_steps;
        if (!failed) {
          if (k > 0) {
            // energy injected by a reference discontinuity at this tick, at the measured state
            const ControlTarget before = scenario_target(cfg, start, base, base_x0, t - kLeftLimit);
            const ImpedanceErrors eb = impedance_error(out.x, out.x_dot, before, in.f_e);
            const Vec6& Kd = cfg.controller.gains.Kd;
            monitor.reference_jump(StabilityMonitor::lyapunov(out.err.e, out.err.e_dot, out.M0, Kd) -
                                   StabilityMonitor::lyapunov(eb.e, eb.e_dot, out.M0, Kd));
          }
          const auto& d = monitor.update(out.err.e, out.err.e_dot, out.M0, out.kf_term, out.mu_hat);
          row.V = d.V;
          row.margin = d.margin;
        }
      }
      row.tau = tau;
      rec.rows.push_back(std::move(row));
      if (failed) {
        rec.status = RunStatus::failed;
        rec.failure_tick = k;
        rec.failure_reason = "non-finite controller output";
        break;
      }
    }
    if (k == ticks) break;
    if (cfg.coupling.enabled && k % ratio != 0) tau = joint_regulation(s);

    prev_twist = kin.ee_twist;
    have_prev = true;
    tau_prev = tau;
    if (observe) observe(k, tau);
    s = plant.step(s, tau, cfg.base, t, dt, f_d);
    if (!s.finite()) {
      rec.status = RunStatus::failed;
      rec.failure_tick = k + 1;
      rec.failure_reason = "non-finite plant state";
      break;
    }
  }

  const auto& d = monitor.diagnostics();
  rec.min_margin = d.min_margin;
  rec.nonconformant = d.nonconformant;
  rec.delta_u = d.delta_u;
  if (rec.status == RunStatus::ok && rec.nonconformant) rec.status = RunStatus::nonconformant;
  return rec;
}

/// Aggregate metrics of a run as configured by its metric windows.
struct RunMetrics {
  std::optional<ErrorMetrics> force;
  std::optional<Vec6> motion_sse;  // signed mean pose error per axis
};

inline RunMetrics compute_run_metrics(const RunRecord& rec, const ScenarioConfig& cfg) {
  RunMetrics m;
  if (rec.status == RunStatus::failed) return m;
  const auto t = rec.time();
  if (cfg.metrics.force) {
    const Window w = *cfg.metrics.force;
    const Window s = cfg.metrics.force_sse.value_or(w);
    m.force = compute_metrics(t, rec.force_error(), w.start, w.end, s.start, s.end);
  }
  if (cfg.metrics.motion_sse) {
    Vec6 v;
    for (int i = 0; i < 6; ++i)
      v[i] = mean(window_samples(t, rec.pose_error(i), cfg.metrics.motion_sse->start, cfg.metrics.motion_sse->end));
    m.motion_sse = v;
  }
  return m;
}

/// Paired predicted/measured coupling series and their per-axis discrepancy.
struct CouplingReport {
  std::vector<double> t;
  std::vector<Vec6> predicted, measured;
  Vec6 rmse = Vec6::Zero(), mae = Vec6::Zero(), peak = Vec6::Zero();
  RunStatus status = RunStatus::ok;
};

/// Joint-regulation run on the moving base comparing the model's coupling wrench with the
/// interface measurement. The measured series is tared by the first sample that follows an
/// applied torque (the second control tick); the initial tick has no torque history.
inline CouplingReport coupling_validation_run(ScenarioConfig cfg) {
  cfg.coupling.enabled = true;
  if (cfg.coupling.joints.size() != cfg.robot.dof())
    throw ConfigError("coupling_validation.joints: expected " + std::to_string(cfg.robot.dof()) + " entries");
  const RunRecord rec = run_scenario(cfg);
  CouplingReport r;
  r.status = rec.status;
  if (rec.rows.size() < 2) return r;
  const Vec6 tare = rec.rows[1].interface - rec.rows[1].mu_c;
  for (std::size_t k = 1; k < rec.rows.size(); ++k) {
    const RunRow& row = rec.rows[k];
    r.t.push_back(row.t);
    r.predicted.push_back(row.mu_c);
    r.measured.push_back(row.interface - tare);
  }
  for (int i = 0; i < 6; ++i) {
    std::vector<double> e;
    for (std::size_t k = 0; k < r.t.size(); ++k) {
      e.push_back(r.measured[k][i] - r.predicted[k][i]);
      r.peak[i] = std::max(r.peak[i], std::abs(r.predicted[k][i]));
    }
    r.rmse[i] = rmse(e);
    r.mae[i] = mae(e);
  }
  return r;
}

}  // namespace mmude
