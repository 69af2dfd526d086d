/**
 * @file metrics.hpp
 * @brief Tracking metrics: RMSE, MAE and steady-state error (signed window mean).
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace mmude {

struct ErrorMetrics {
  double rmse = 0.0;
  double mae = 0.0;
  double sse = 0.0;        // signed mean over the steady-state window
  std::size_t samples = 0;  // in the main window
};

/// Samples of `err` whose time stamp lies in [t0, t1].
inline std::vector<double> window_samples(const std::vector<double>& t, const std::vector<double>& err, double t0,
                                          double t1) {
  if (t.size() != err.size()) throw std::invalid_argument("metrics: time and error series differ in length");
  std::vector<double> out;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= t0 - 1e-9 && t[i] <= t1 + 1e-9) out.push_back(err[i]);
  return out;
}

inline double rmse(const std::vector<double>& e) {
  if (e.empty()) throw std::invalid_argument("metrics: empty window");
  double s = 0.0;
  for (double v : e) s += v * v;
  return std::sqrt(s / static_cast<double>(e.size()));
}

inline double mae(const std::vector<double>& e) {
  if (e.empty()) throw std::invalid_argument("metrics: empty window");
  double s = 0.0;
  for (double v : e) s += std::abs(v);
  return s / static_cast<double>(e.size());
}

inline double mean(const std::vector<double>& e) {
  if (e.empty()) throw std::invalid_argument("metrics: empty window");
  double s = 0.0;
  for (double v : e) s += v;
  return s / static_cast<double>(e.size());
}

/// RMSE and MAE over [w0, w1]; SSE as the mean over [s0, s1].
inline ErrorMetrics compute_metrics(const std::vector<double>& t, const std::vector<double>& err, double w0, double w1,
                                    double s0, double s1) {
  const auto main = window_samples(t, err, w0, w1);
  const auto steady = window_samples(t, err, s0, s1);
  ErrorMetrics m;
  m.rmse = rmse(main);
  m.mae = mae(main);
  m.sse = mean(steady);
  m.samples = main.size();
  return m;
}

/// Percentage improvement of `value` relative to `reference` (positive when smaller).
inline double improvement_percent(double value, double reference) {
  if (reference == 0.0) return 0.0;
  return 100.0 * (reference - value) / std::abs(reference);
}

}  // namespace mmude
