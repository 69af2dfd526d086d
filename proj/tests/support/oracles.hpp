// Independent reference computations shared by the unit and acceptance suites.
#pragma once

#include "mmude/sigproc/transfer_function.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace oracle {

/// Companion-form realization of num/den (ascending coefficients), built from scratch.
struct ContinuousFilter {
  Eigen::MatrixXd A;
  Eigen::VectorXd B, C;
  double D = 0.0;

  ContinuousFilter(std::vector<double> num, std::vector<double> den) {
    const int N = static_cast<int>(den.size()) - 1;
    const double lead = den[N];
    num.resize(N + 1, 0.0);
    A = Eigen::MatrixXd::Zero(N, N);
    B = Eigen::VectorXd::Zero(N);
    C = Eigen::VectorXd::Zero(N);
    D = num[N] / lead;
    for (int i = 0; i + 1 < N; ++i) A(i, i + 1) = 1.0;
    for (int i = 0; i < N; ++i) {
      A(N - 1, i) = -den[i] / lead;
      C[i] = num[i] / lead - D * den[i] / lead;
    }
    if (N > 0) B[N - 1] = 1.0;
  }
};

/// Integrates the continuous filter with classical RK4 at step h while the input is the linear
/// interpolation of the samples u[k] at t = kT (u[-1] = 0). Returns y(kT).
inline std::vector<double> simulate_sampled(const ContinuousFilter& f, const std::vector<double>& u, double T,
                                            int substeps) {
  const int N = static_cast<int>(f.A.rows());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
  std::vector<double> y(u.size());
  const double h = T / substeps;
  double u_prev = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    // advance over [(k-1)T, kT]
    auto uin = [&](double s) { return u_prev + (u[k] - u_prev) * s / T; };
    auto rhs = [&](const Eigen::VectorXd& xx, double s) -> Eigen::VectorXd { return f.A * xx + f.B * uin(s); };
    for (int j = 0; j < substeps && N > 0; ++j) {
      const double s = j * h;
      const Eigen::VectorXd k1 = rhs(x, s);
      const Eigen::VectorXd k2 = rhs(x + 0.5 * h * k1, s + 0.5 * h);
      const Eigen::VectorXd k3 = rhs(x + 0.5 * h * k2, s + 0.5 * h);
      const Eigen::VectorXd k4 = rhs(x + h * k3, s + h);
      x += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    y[k] = (N > 0 ? f.C.dot(x) : 0.0) + f.D * u[k];
    u_prev = u[k];
  }
  return y;
}

/// Largest absolute deviation between a discrete filter and the continuous oracle on a unit step.
inline double step_response_deviation(const mmude::TransferFunction& tf, const mmude::FilterState& discrete,
                                      double duration, int substeps) {
  const double T = discrete.sample_period();
  const int n = static_cast<int>(duration / T);
  std::vector<double> u(n, 1.0);
  const auto yc = simulate_sampled(ContinuousFilter(tf.num, tf.den), u, T, substeps);
  mmude::FilterState d = discrete;
  d.reset();
  double worst = 0.0;
  for (int k = 0; k < n; ++k) worst = std::max(worst, std::abs(d.step(u[k]) - yc[k]));
  return worst;
}

/// Two-pass RMSE/MAE/mean used to cross-check the metrics module.
struct Stats {
  double rmse, mae, mean;
};

inline Stats two_pass_stats(const std::vector<double>& e) {
  long double s2 = 0, s1 = 0, sm = 0;
  for (double v : e) sm += v;
  for (double v : e) {
    s2 += static_cast<long double>(v) * v;
    s1 += std::abs(v);
  }
  const long double n = static_cast<long double>(e.size());
  return {static_cast<double>(std::sqrt(s2 / n)), static_cast<double>(s1 / n), static_cast<double>(sm / n)};
}

}  // namespace oracle
