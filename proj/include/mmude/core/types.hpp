/**
 * @file types.hpp
 * @brief Fixed-capacity Eigen aliases and small value types shared by every module.
 */
#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mmude {

/// Upper bound on arm DOF; lets joint-space objects live on the stack.
inline constexpr int kMaxDof = 8;

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

using VecX = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDof, 1>;
using MatX = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDof, kMaxDof>;
using Mat6X = Eigen::Matrix<double, 6, Eigen::Dynamic, 0, 6, kMaxDof>;
using MatX6 = Eigen::Matrix<double, Eigen::Dynamic, 6, 0, kMaxDof, 6>;

/// Rigid transform as an explicit rotation/translation pair.
struct Pose {
  Mat3 R = Mat3::Identity();
  Vec3 p = Vec3::Zero();

  [[nodiscard]] Pose operator*(const Pose& rhs) const { return {R * rhs.R, R * rhs.p + p}; }
  [[nodiscard]] Vec3 apply(const Vec3& v) const { return R * v + p; }
  [[nodiscard]] Pose inverse() const { return {R.transpose(), -(R.transpose() * p)}; }
};

/// Frame a wrench (or twist) is expressed in.
enum class Frame { inertial, body, end_effector };

inline const char* to_string(Frame f) {
  switch (f) {
    case Frame::inertial: return "inertial";
    case Frame::body: return "body";
    case Frame::end_effector: return "end_effector";
  }
  return "?";
}

/// Force/torque pair, linear part first.
struct Wrench {
  Vec6 value = Vec6::Zero();
  Frame frame = Frame::inertial;

  Wrench() = default;
  explicit Wrench(const Vec6& v, Frame f = Frame::inertial) : value(v), frame(f) {}

  [[nodiscard]] Vec3 force() const { return value.head<3>(); }
  [[nodiscard]] Vec3 torque() const { return value.tail<3>(); }
  [[nodiscard]] bool finite() const { return value.allFinite(); }

  static Wrench zero(Frame f = Frame::inertial) { return Wrench(Vec6::Zero(), f); }
};

/// Throws unless @p w is tagged with @p expected.
inline void require_frame(const Wrench& w, Frame expected, const char* where) {
  if (w.frame != expected) {
    throw std::invalid_argument(std::string(where) + ": wrench expressed in " + to_string(w.frame) +
                                ", expected " + to_string(expected));
  }
}

inline Mat6 block_diag(const Mat3& a, const Mat3& b) {
  Mat6 m = Mat6::Zero();
  m.topLeftCorner<3, 3>() = a;
  m.bottomRightCorner<3, 3>() = b;
  return m;
}

}  // namespace mmude
