/**
 * @file ude_filters.hpp
 * @brief UDE filter banks: coupling filters G_f1, sG_f1 and the composite operators built from G_f2.
 */
#pragma once

#include "mmude/core/types.hpp"
#include "mmude/sigproc/transfer_function.hpp"

#include <array>
#include <optional>
#include <stdexcept>

namespace mmude {

/// Default coupling filter: 108 s / (s^2 + 8.485 s + 36).
inline TransferFunction bandpass_gf1() { return {{0.0, 108.0}, {36.0, 8.485, 1.0}}; }

/// Unit-DC-gain low-pass sharing the poles of bandpass_gf1().
inline TransferFunction lowpass_gf1() { return {{36.0}, {36.0, 8.485, 1.0}}; }

inline constexpr std::array<double, 6> kDefaultCutoffs{6.0, 6.0, 6.0, 3.0, 3.0, 3.0};

/// Realizes u -> 1/(1 - G) u and u -> sG/(1 - G) u for one axis.
///
/// For G = w/(s + w) the operators reduce to 1 + w/s (unity feedthrough plus a Tustin
/// integrator) and the constant w. Other strictly proper, unit-DC-gain G are realized from
/// 1/(1 - G) = den/(den - num) and sG/(1 - G) = s num/(den - num) with the pole at s = 0
/// cancelled symbolically in the second operator.
class CompositeOperator {
 public:
  enum class Form { simplified, rational };

  CompositeOperator() = default;

  CompositeOperator(const TransferFunction& g, double Ts) : Ts_(Ts) {
    if (!(Ts > 0.0)) throw std::invalid_argument("composite operator: sample period must be > 0");
    if (!g.strictly_proper()) {
      throw std::invalid_argument("composite operator: G_f2 = " + g.to_string() + " must be strictly proper");
    }
    if (std::abs(g.dc_gain() - 1.0) > 1e-12) {
      throw std::invalid_argument("composite operator: G_f2 = " + g.to_string() + " must have unit DC gain");
    }
    if (g.order() == 1 && poly::degree(g.num) == 0) {
      form_ = Form::simplified;
      omega_ = g.den[0] / g.den[1];
      return;
    }
    form_ = Form::rational;
    const Poly diff = poly::sub(g.den, g.num);  // has a root at s = 0
    Poly diff_over_s(diff.begin() + 1, diff.end());
    integral_ = discretize(TransferFunction(g.den, diff), Ts);
    proportional_ = discretize(TransferFunction(g.num, diff_over_s), Ts);
  }

  static CompositeOperator first_order(double omega, double Ts) {
    if (!(omega > 0.0)) throw std::invalid_argument("composite operator: cutoff must be > 0");
    return CompositeOperator(TransferFunction::first_order_lowpass(omega), Ts);
  }

  [[nodiscard]] Form form() const { return form_; }
  [[nodiscard]] double omega() const { return omega_; }

  /// Output of 1/(1 - G) for input u without advancing state.
  [[nodiscard]] double integral_preview(double u) const {
    if (form_ == Form::simplified) return u + omega_ * (acc_ + 0.5 * Ts_ * (u + u_prev_));
    return integral_.preview(u);
  }

  /// Advances 1/(1 - G). With @p freeze the integrator holds its value (anti-windup).
  void integral_advance(double u, bool freeze = false) {
    if (form_ == Form::simplified) {
      if (!freeze) acc_ += 0.5 * Ts_ * (u + u_prev_);
      u_prev_ = u;
      return;
    }
    if (!freeze) integral_.advance(u);
  }

  double integral_step(double u, bool freeze = false) {
    const double y = freeze ? integral_hold_output(u) : integral_preview(u);
    integral_advance(u, freeze);
    return y;
  }

  /// sG/(1 - G) applied to u.
  double proportional_step(double u) {
    if (form_ == Form::simplified) return omega_ * u;
    return proportional_.step(u);
  }
  [[nodiscard]] double proportional_preview(double u) const {
    return form_ == Form::simplified ? omega_ * u : proportional_.preview(u);
  }
  void proportional_advance(double u) {
    if (form_ == Form::rational) proportional_.advance(u);
  }

  /// Integrator contents (simplified form); the state norm for the rational form.
  [[nodiscard]] double integrator_state() const {
    return form_ == Form::simplified ? acc_ : integral_.state().norm();
  }

  void reset() {
    acc_ = 0.0;
    u_prev_ = 0.0;
    integral_.reset();
    proportional_.reset();
  }

 private:
  [[nodiscard]] double integral_hold_output(double u) const {
    if (form_ == Form::simplified) return u + omega_ * acc_;
    return integral_.preview(u);
  }

  Form form_ = Form::simplified;
  double Ts_ = 0.008;
  double omega_ = 1.0;
  double acc_ = 0.0;
  double u_prev_ = 0.0;
  FilterState integral_, proportional_;
};

/// Per-axis composite operators.
class CompositeBank6 {
 public:
  CompositeBank6() = default;
  CompositeBank6(const std::array<TransferFunction, 6>& g, double Ts) {
    for (int i = 0; i < 6; ++i) ops_[i] = CompositeOperator(g[i], Ts);
  }

  [[nodiscard]] Vec6 integral_preview(const Vec6& u) const {
    Vec6 y;
    for (int i = 0; i < 6; ++i) y[i] = ops_[i].integral_preview(u[i]);
    return y;
  }
  void integral_advance(const Vec6& u, bool freeze) {
    for (int i = 0; i < 6; ++i) ops_[i].integral_advance(u[i], freeze);
  }
  [[nodiscard]] Vec6 proportional_preview(const Vec6& u) const {
    Vec6 y;
    for (int i = 0; i < 6; ++i) y[i] = ops_[i].proportional_preview(u[i]);
    return y;
  }
  void proportional_advance(const Vec6& u) {
    for (int i = 0; i < 6; ++i) ops_[i].proportional_advance(u[i]);
  }
  [[nodiscard]] Vec6 integrator_state() const {
    Vec6 s;
    for (int i = 0; i < 6; ++i) s[i] = ops_[i].integrator_state();
    return s;
  }
  void reset() {
    for (auto& o : ops_) o.reset();
  }
  [[nodiscard]] const CompositeOperator& axis(int i) const { return ops_[i]; }

 private:
  std::array<CompositeOperator, 6> ops_;
};

struct UdeFilters {
  TransferFunction gf1, sgf1;
  std::array<TransferFunction, 6> gf2;
  FilterBank6 gf1_bank, sgf1_bank, gf2_bank;
  CompositeBank6 composite;
};

/// Builds the coupling filters and the per-axis G_f2 with cutoffs @p wc.
///
/// The coupling filters use the triangle-hold equivalent (their inputs are sampled smooth
/// velocities); G_f2 and its composite operators use Tustin so that the two algebraically
/// equivalent forms of the feedback law stay equivalent after discretization.
inline UdeFilters make_filters(const TransferFunction& gf1, const std::array<double, 6>& wc, double Ts,
                                 Discretization coupling_method = Discretization::triangle_hold) {
  UdeFilters f;
  f.gf1 = gf1;
  f.sgf1 = gf1.times_s();
  for (int i = 0; i < 6; ++i) f.gf2[i] = TransferFunction::first_order_lowpass(wc[i]);
  f.gf1_bank = FilterBank6(f.gf1, Ts, coupling_method);
  f.sgf1_bank = FilterBank6(f.sgf1, Ts, coupling_method);
  std::array<FilterState, 6> g2;
  for (int i = 0; i < 6; ++i) g2[i] = discretize(f.gf2[i], Ts);
  f.gf2_bank = FilterBank6(g2);
  f.composite = CompositeBank6(f.gf2, Ts);
  return f;
}

inline UdeFilters make_default_filters(double Ts = 0.008) { return make_filters(bandpass_gf1(), kDefaultCutoffs, Ts); }

}  // namespace mmude
