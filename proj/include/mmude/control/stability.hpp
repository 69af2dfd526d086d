/**
 * @file stability.hpp
 * @brief Online Lyapunov/dissipation diagnostics for the impedance loop.
 *
 * V = 1/2 e_dot^T M0 e_dot + 1/2 e^T Kd e. The interaction port supplies
 * integral(e_dot^T Kf e_f dt); the margin V(0) + supplied - V(t) must stay non-negative.
 * The controller holds Kf e_f over each control period, so the supply of one period is the
 * exact work of the held port force, (Kf e_f)_k^T (e_{k+1} - e_k).
 * Step changes of the reference (a velocity kink in the task schedule, a mode switch) move V
 * without any motion of the plant; that energy is booked as supplied through reference_jump().
 */
#pragma once

#include "mmude/control/impedance.hpp"
#include "mmude/core/types.hpp"

namespace mmude {

struct StabilityDiagnostics {
  Vec6 delta_u = Vec6::Zero();       // running bound on |e_dot_i mu_i| / (e_dot_i^2 + eps)
  Vec6 Cd_hat = Vec6::Zero();        // Cd - delta_u
  bool damping_positive = true;
  double V = 0.0;
  double V0 = 0.0;
  double supplied = 0.0;             // integral of e_dot^T Kf e_f plus reference jumps
  double reference_energy = 0.0;     // part of `supplied` booked by reference jumps
  double margin = 0.0;               // V0 + supplied - V
  double min_margin = 0.0;
  int consecutive_violations = 0;
  bool nonconformant = false;
};

class StabilityMonitor {
 public:
  static constexpr double kEps = 1e-9;

  explicit StabilityMonitor(const ImpedanceParams& params, double tolerance = 1e-3, int max_violation_steps = 5)
      : params_(params), tol_(tolerance), max_steps_(max_violation_steps) {}

  static double lyapunov(const Vec6& e, const Vec6& e_dot, const Mat6& M0, const Vec6& Kd) {
    return 0.5 * e_dot.dot(M0 * e_dot) + 0.5 * e.dot(Kd.cwiseProduct(e));
  }

  /// Books the change of V caused by a discontinuous reference at the current state.
  void reference_jump(double energy) {
    d_.supplied += energy;
    d_.reference_energy += energy;
  }

  /// @param kf_ef the force-port term K_f e_f already masked to force axes
  const StabilityDiagnostics& update(const Vec6& e, const Vec6& e_dot, const Mat6& M0, const Vec6& kf_ef,
                                     const Vec6& mu_hat) {
    d_.V = lyapunov(e, e_dot, M0, params_.Kd);
    if (first_) {
      d_.V0 = d_.V;
      first_ = false;
    } else {
      d_.supplied += last_kf_ef_.dot(e - last_e_);
    }
    last_e_ = e;
    last_kf_ef_ = kf_ef;
    d_.margin = d_.V0 + d_.supplied - d_.V;
    d_.min_margin = std::min(d_.min_margin, d_.margin);
    if (d_.margin < -tol_) {
      if (++d_.consecutive_violations > max_steps_) d_.nonconformant = true;
    } else {
      d_.consecutive_violations = 0;
    }
    for (int i = 0; i < 6; ++i) {
      const double bound = std::abs(e_dot[i] * mu_hat[i]) / (e_dot[i] * e_dot[i] + kEps);
      d_.delta_u[i] = std::max(d_.delta_u[i], bound);
    }
    d_.Cd_hat = params_.Cd - d_.delta_u;
    d_.damping_positive = (d_.Cd_hat.array() > 0.0).all();
    return d_;
  }

  [[nodiscard]] const StabilityDiagnostics& diagnostics() const { return d_; }

 private:
  ImpedanceParams params_;
  double tol_;
  int max_steps_;
  bool first_ = true;
  Vec6 last_e_ = Vec6::Zero();
  Vec6 last_kf_ef_ = Vec6::Zero();
  StabilityDiagnostics d_;
};

}  // namespace mmude
