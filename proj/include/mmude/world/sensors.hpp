/**
 * @file sensors.hpp
 * @brief Seeded wrench sensors with noise, bias and sample-and-hold; quantized encoders.
 */
#pragma once

#include "mmude/core/types.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace mmude {

struct WrenchSensorConfig {
  double sigma = 0.0;           // per-component Gaussian noise
  Vec6 bias = Vec6::Zero();
  double rate_hz = 0.0;         // 0 samples at every physics step

  void validate(const std::string& where, double physics_dt) const {
    if (!(sigma >= 0.0)) throw std::invalid_argument(where + ".sigma must be >= 0");
    if (!bias.allFinite()) throw std::invalid_argument(where + ".bias must be finite");
    if (rate_hz < 0.0) throw std::invalid_argument(where + ".rate_hz must be >= 0");
    if (rate_hz > 0.0) {
      const double ratio = 1.0 / (rate_hz * physics_dt);
      if (ratio < 1.0 - 1e-9 || std::abs(ratio - std::round(ratio)) > 1e-6)
        throw std::invalid_argument(where + ".rate_hz must divide the physics rate");
    }
  }
};

struct EncoderConfig {
  double quantization = 0.0;  // rad, 0 disables

  void validate(const std::string& where) const {
    if (!(quantization >= 0.0)) throw std::invalid_argument(where + ".quantization must be >= 0");
  }
};

struct SensorSuite {
  WrenchSensorConfig force_torque;
  WrenchSensorConfig interface;
  EncoderConfig encoders;

  void validate(double physics_dt) const {
    force_torque.validate("sensors.force_torque", physics_dt);
    interface.validate("sensors.interface", physics_dt);
    encoders.validate("sensors.encoders");
  }
};

class WrenchSensor {
 public:
  WrenchSensor(WrenchSensorConfig cfg, double physics_dt, std::uint64_t seed) : cfg_(std::move(cfg)), rng_(seed) {
    period_ = cfg_.rate_hz > 0.0 ? static_cast<long>(std::llround(1.0 / (cfg_.rate_hz * physics_dt))) : 1;
  }

  /// Measurement at physics tick k; a new sample is drawn every period and held in between.
  Wrench sample(const Wrench& truth, long tick) {
    if (tick % period_ == 0 || !valid_) {
      held_ = Wrench(truth.value + cfg_.bias, truth.frame);
      if (cfg_.sigma > 0.0)
        for (int i = 0; i < 6; ++i) held_.value[i] += cfg_.sigma * noise_(rng_);
      valid_ = true;
    }
    return held_;
  }

 private:
  WrenchSensorConfig cfg_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> noise_{0.0, 1.0};
  long period_ = 1;
  bool valid_ = false;
  Wrench held_ = Wrench::zero();
};

inline VecX quantize(const VecX& q, const EncoderConfig& cfg) {
  if (cfg.quantization <= 0.0) return q;
  VecX out(q.size());
  for (int i = 0; i < q.size(); ++i) out[i] = cfg.quantization * std::round(q[i] / cfg.quantization);
  return out;
}

}  // namespace mmude
