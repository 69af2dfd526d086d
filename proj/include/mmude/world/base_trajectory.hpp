/**
 * @file base_trajectory.hpp
 * @brief Prescribed mobile-base motion built from analytic segments.
 *
 * Each segment drives one coordinate (x, y, z or yaw) and starts at its own time with an
 * optional quintic ramp so that velocity, and for ramped segments acceleration, stay continuous.
 */
#pragma once

#include "mmude/core/rotation.hpp"
#include "mmude/core/types.hpp"
#include "mmude/kinodyn/kinematics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmude {

enum class BaseAxis { x = 0, y = 1, z = 2, yaw = 5 };

struct BaseSegment {
  enum class Kind { hold, constant_velocity, sinusoid };
  Kind kind = Kind::hold;
  BaseAxis axis = BaseAxis::x;
  double speed = 0.0;      // m/s or rad/s (constant_velocity)
  double amplitude = 0.0;  // m or rad (sinusoid)
  double omega = 0.0;      // rad/s (sinusoid)
  double phase = 0.0;      // rad (sinusoid)
  double start = 0.0;      // s
  double ramp = 0.0;       // s, smooth blend-in duration; 0 starts abruptly

  void validate(const std::string& where) const {
    if (!std::isfinite(speed) || !std::isfinite(amplitude) || !std::isfinite(omega) || !std::isfinite(phase))
      throw std::invalid_argument(where + ": parameters must be finite");
    if (start < 0.0) throw std::invalid_argument(where + ".start must be >= 0");
    if (ramp < 0.0) throw std::invalid_argument(where + ".ramp must be >= 0");
    if (kind == Kind::sinusoid && omega < 0.0) throw std::invalid_argument(where + ".omega must be >= 0");
  }
};

struct BaseTrajectory {
  Vec3 initial_position = Vec3::Zero();
  double initial_yaw = 0.0;
  std::vector<BaseSegment> segments;

  static BaseTrajectory hold() { return {}; }

  static BaseTrajectory constant_velocity(double speed, double start = 0.0, double ramp = 0.0) {
    BaseTrajectory t;
    t.segments.push_back({BaseSegment::Kind::constant_velocity, BaseAxis::x, speed, 0.0, 0.0, 0.0, start, ramp});
    return t;
  }

  static BaseTrajectory sinusoid(BaseAxis axis, double amplitude, double omega, double start = 0.0,
                                 double ramp = 0.0, double phase = 0.0) {
    BaseTrajectory t;
    t.segments.push_back({BaseSegment::Kind::sinusoid, axis, 0.0, amplitude, omega, phase, start, ramp});
    return t;
  }

  /// Forward 0.2 m/s with a 0.15 m, 2 rad/s lateral sway and an optional yaw sway.
  static BaseTrajectory high_dynamic(double start = 0.0, double ramp = 0.0, double yaw_amplitude = 0.0,
                                     double yaw_omega = 1.0) {
    BaseTrajectory t = constant_velocity(0.2, start, ramp);
    t.segments.push_back({BaseSegment::Kind::sinusoid, BaseAxis::y, 0.0, 0.15, 2.0, 0.0, start, ramp});
    if (yaw_amplitude != 0.0)
      t.segments.push_back({BaseSegment::Kind::sinusoid, BaseAxis::yaw, 0.0, yaw_amplitude, yaw_omega, 0.0, start, ramp});
    return t;
  }

  void validate() const {
    if (!initial_position.allFinite() || !std::isfinite(initial_yaw))
      throw std::invalid_argument("base.initial pose must be finite");
    for (std::size_t i = 0; i < segments.size(); ++i) segments[i].validate("base.segments[" + std::to_string(i) + "]");
  }
};

/// Base state with the true acceleration, which only the plant side consumes.
struct BaseSample {
  BaseState state;
  BaseAcceleration acc;
  double yaw = 0.0;

  /// (x, y, z, roll, pitch, yaw) for logging.
  [[nodiscard]] Vec6 pose_vector() const {
    Vec6 v;
    v << state.position, 0.0, 0.0, yaw;
    return v;
  }
};

namespace detail {

/// Quintic smoothstep and its first two derivatives with respect to u.
struct Blend {
  double s, ds, dds;
};

inline Blend smoothstep(double u) {
  if (u <= 0.0) return {0.0, 0.0, 0.0};
  if (u >= 1.0) return {1.0, 0.0, 0.0};
  const double u2 = u * u, u3 = u2 * u;
  return {u3 * (10.0 - 15.0 * u + 6.0 * u2), 30.0 * u2 * (1.0 - u) * (1.0 - u), 60.0 * u * (1.0 - 3.0 * u + 2.0 * u2)};
}

/// Value, rate and second rate of one segment at time t.
inline Vec3 segment_signal(const BaseSegment& s, double t) {
  if (s.kind == BaseSegment::Kind::hold || t <= s.start) return Vec3::Zero();
  const double tau = t - s.start;
  Blend e{1.0, 0.0, 0.0};
  if (s.ramp > 0.0) {
    const Blend b = smoothstep(tau / s.ramp);
    e = {b.s, b.ds / s.ramp, b.dds / (s.ramp * s.ramp)};
  }
  if (s.kind == BaseSegment::Kind::constant_velocity) {
    // velocity v e(t); position integrates the quintic in closed form
    double pos;
    if (s.ramp > 0.0 && tau < s.ramp) {
      const double u = tau / s.ramp;
      pos = s.ramp * u * u * u * u * (2.5 - 3.0 * u + u * u);
    } else {
      pos = tau - 0.5 * s.ramp;
    }
    return {s.speed * pos, s.speed * e.s, s.speed * e.ds};
  }
  const double a = s.omega * tau + s.phase;
  const double f = s.amplitude * std::sin(a);
  const double df = s.amplitude * s.omega * std::cos(a);
  const double ddf = -s.amplitude * s.omega * s.omega * std::sin(a);
  return {e.s * f, e.ds * f + e.s * df, e.dds * f + 2.0 * e.ds * df + e.s * ddf};
}

}  // namespace detail

inline BaseSample base_state_at(const BaseTrajectory& traj, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("base_state_at: t must be >= 0");
  Vec3 p = traj.initial_position, v = Vec3::Zero(), a = Vec3::Zero();
  Vec3 yaw(traj.initial_yaw, 0.0, 0.0);
  for (const auto& s : traj.segments) {
    const Vec3 sig = detail::segment_signal(s, t);
    if (s.axis == BaseAxis::yaw) {
      yaw += sig;
    } else {
      const int i = static_cast<int>(s.axis);
      p[i] += sig[0];
      v[i] += sig[1];
      a[i] += sig[2];
    }
  }
  BaseSample out;
  out.yaw = yaw[0];
  out.state.position = p;
  out.state.R = rot_z(yaw[0]);
  out.state.linear_velocity = v;
  out.state.angular_velocity = Vec3(0.0, 0.0, yaw[1]);
  out.acc.linear = a;
  out.acc.angular = Vec3(0.0, 0.0, yaw[2]);
  return out;
}

}  // namespace mmude
