/**
 * @file filters_check.hpp
 * @brief Discrete UDE filters against continuous references: step responses and frequency
 * responses, as data tables.
 */
#pragma once

#include "mmude/sigproc/transfer_function.hpp"
#include "mmude/sigproc/ude_filters.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

namespace mmude {

/// Continuous response to the piecewise-linear interpolation of samples u[k] at t = kT
/// (u[-1] = 0), integrated by RK4 with `substeps` per period. Returns y(kT).
inline std::vector<double> continuous_sampled_response(const TransferFunction& tf, const std::vector<double>& u, double T,
                                                       int substeps = 80) {
  const detail::ContinuousSS ss = detail::continuous_realization(tf);
  const int N = static_cast<int>(ss.A.rows());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
  std::vector<double> y;
  y.reserve(u.size());
  const double h = T / substeps;
  double prev = 0.0;
  for (double uk : u) {
    // advance over ((k-1)T, kT] with the input ramping from u[k-1] to u[k]
    auto input = [&](double s) { return prev + (uk - prev) * s / T; };
    auto f = [&](const Eigen::VectorXd& xs, double s) -> Eigen::VectorXd { return ss.A * xs + ss.B * input(s); };
    for (int i = 0; i < substeps; ++i) {
      const double s = i * h;
      const Eigen::VectorXd k1 = f(x, s);
      const Eigen::VectorXd k2 = f(x + 0.5 * h * k1, s + 0.5 * h);
      const Eigen::VectorXd k3 = f(x + 0.5 * h * k2, s + 0.5 * h);
      const Eigen::VectorXd k4 = f(x + h * k3, s + h);
      x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    y.push_back((N > 0 ? ss.C.dot(x) : 0.0) + ss.D * uk);
    prev = uk;
  }
  return y;
}

/// Discrete frequency response of a filter at angular frequency w [rad/s].
inline std::complex<double> discrete_frequency_response(const FilterState& f, double w) {
  const std::complex<double> zinv = std::exp(std::complex<double>(0.0, -w * f.sample_period()));
  std::complex<double> num = 0.0, den = 0.0, p = 1.0;
  for (std::size_t k = 0; k < f.a().size(); ++k) {
    if (k < f.b().size()) num += f.b()[k] * p;
    den += f.a()[k] * p;
    p *= zinv;
  }
  return num / den;
}

struct FilterCheckItem {
  std::string name;
  TransferFunction tf;
  Discretization method = Discretization::tustin;
};

/// The filters used by the controllers: both G_f1 variants (with sG_f1) under the coupling
/// discretization and Tustin, and G_f2 for every distinct cutoff.
inline std::vector<FilterCheckItem> standard_filter_set() {
  std::vector<FilterCheckItem> v;
  for (auto m : {Discretization::triangle_hold, Discretization::tustin}) {
    const std::string tag = std::string("_") + to_string(m);
    v.push_back({"gf1_bandpass" + tag, bandpass_gf1(), m});
    v.push_back({"gf1_lowpass" + tag, lowpass_gf1(), m});
    v.push_back({"sgf1_lowpass" + tag, lowpass_gf1().times_s(), m});
  }
  for (double w : {6.0, 3.0}) {
    char name[32];
    std::snprintf(name, sizeof name, "gf2_w%g_tustin", w);
    v.push_back({name, TransferFunction::first_order_lowpass(w), Discretization::tustin});
  }
  return v;
}

struct FilterCheckResult {
  std::string name;
  double max_step_error = 0.0;
  std::string step_csv, frequency_csv;
};

inline FilterCheckResult check_filter(const FilterCheckItem& item, double Ts = 0.008, double duration = 5.0) {
  FilterCheckResult r;
  r.name = item.name;
  FilterState f = discretize(item.tf, Ts, item.method);
  const int n = static_cast<int>(std::lround(duration / Ts)) + 1;
  const std::vector<double> u(n, 1.0);
  const std::vector<double> ref = continuous_sampled_response(item.tf, u, Ts);
  char buf[128];
  r.step_csv = "t,discrete,continuous,error\n";
  for (int k = 0; k < n; ++k) {
    const double y = f.step(u[k]);
    r.max_step_error = std::max(r.max_step_error, std::abs(y - ref[k]));
    std::snprintf(buf, sizeof buf, "%.6g,%.17g,%.17g,%.6g\n", k * Ts, y, ref[k], y - ref[k]);
    r.step_csv += buf;
  }
  r.frequency_csv = "w,continuous_mag,continuous_phase,discrete_mag,discrete_phase\n";
  const double nyquist = M_PI / Ts;
  for (int i = 0; i <= 200; ++i) {
    const double w = 0.1 * std::pow(nyquist / 0.1, i / 200.0) * (i == 200 ? 0.999 : 1.0);
    const auto hc = item.tf.frequency_response(w);
    const auto hd = discrete_frequency_response(f, w);
    std::snprintf(buf, sizeof buf, "%.6g,%.10g,%.10g,%.10g,%.10g\n", w, std::abs(hc), std::arg(hc), std::abs(hd),
                  std::arg(hd));
    r.frequency_csv += buf;
  }
  return r;
}

}  // namespace mmude
