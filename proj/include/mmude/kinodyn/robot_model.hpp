/**
 * @file robot_model.hpp
 * @brief Kinematic and inertial description of a revolute serial arm mounted on a mobile base.
 *
 * Every joint rotates about a fixed axis of its own frame. The joint frame of link i is placed
 * by (origin_xyz, origin_rpy) relative to the frame of link i-1 after its rotation, or relative
 * to the mount frame for i = 0. Link mass properties are expressed in the link frame.
 */
#pragma once

#include "mmude/core/rotation.hpp"
#include "mmude/core/types.hpp"

#include <json.hpp>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmude {

struct Link {
  std::string name;
  Vec3 origin_xyz = Vec3::Zero();
  Vec3 origin_rpy = Vec3::Zero();
  Vec3 axis = Vec3::UnitZ();
  double mass = 1.0;
  Vec3 com = Vec3::Zero();
  Mat3 inertia = Mat3::Identity();  // about the COM, link frame

  [[nodiscard]] Pose origin() const { return {rotation_from_euler_zyx(origin_rpy), origin_xyz}; }
};

struct JointFriction {
  double viscous = 0.0;  // N m s/rad
  double coulomb = 0.0;  // N m
};

struct RobotModel {
  std::vector<Link> links;
  std::vector<JointFriction> friction;
  Pose mount;                                // arm root in the base frame {b}
  Pose tool;                                 // end effector in the last link frame
  Vec3 gravity = Vec3(0.0, 0.0, -9.81);      // inertial frame

  [[nodiscard]] int dof() const { return static_cast<int>(links.size()); }

  /// Throws std::invalid_argument describing the first violated invariant.
  void validate() const {
    const int n = dof();
    if (n < 2 || n > kMaxDof) {
      throw std::invalid_argument("links: need between 2 and " + std::to_string(kMaxDof) +
                                  " links, got " + std::to_string(n));
    }
    if (static_cast<int>(friction.size()) != n) {
      throw std::invalid_argument("friction: expected " + std::to_string(n) + " entries");
    }
    for (int i = 0; i < n; ++i) {
      const Link& l = links[i];
      const std::string where = "links[" + std::to_string(i) + "]";
      if (!(l.mass > 0.0) || !std::isfinite(l.mass)) throw std::invalid_argument(where + ".mass must be > 0");
      if (std::abs(l.axis.norm() - 1.0) > 1e-9) throw std::invalid_argument(where + ".axis must be unit norm");
      if ((l.inertia - l.inertia.transpose()).norm() > 1e-9 * (1.0 + l.inertia.norm())) {
        throw std::invalid_argument(where + ".inertia must be symmetric");
      }
      Eigen::SelfAdjointEigenSolver<Mat3> es(l.inertia, Eigen::EigenvaluesOnly);
      if (!(es.eigenvalues().minCoeff() > 0.0)) {
        throw std::invalid_argument(where + ".inertia must be positive definite");
      }
      if (!l.origin_xyz.allFinite() || !l.origin_rpy.allFinite() || !l.com.allFinite()) {
        throw std::invalid_argument(where + ": non-finite geometry");
      }
      if (friction[i].viscous < 0.0 || friction[i].coulomb < 0.0) {
        throw std::invalid_argument("friction[" + std::to_string(i) + "]: coefficients must be >= 0");
      }
    }
    if (orthonormality_error(mount.R) > 1e-9 || orthonormality_error(tool.R) > 1e-9) {
      throw std::invalid_argument("mount_transform/tool_transform: rotation not orthonormal");
    }
  }

  [[nodiscard]] double total_mass() const {
    double m = 0.0;
    for (const auto& l : links) m += l.mass;
    return m;
  }

  /// Lumps a point payload (with optional rotary inertia about its COM) into the last link.
  [[nodiscard]] RobotModel with_payload(double mass, const Vec3& com_in_tool,
                                        const Mat3& inertia = Mat3::Zero()) const {
    RobotModel out = *this;
    if (mass <= 0.0) return out;
    Link& l = out.links.back();
    const Vec3 c_p = tool.apply(com_in_tool);
    const double m_new = l.mass + mass;
    const Vec3 c_new = (l.mass * l.com + mass * c_p) / m_new;
    // parallel-axis shift of both parts to the combined COM
    auto shift = [](double m, const Vec3& r) { return m * (r.squaredNorm() * Mat3::Identity() - r * r.transpose()); };
    l.inertia = l.inertia + shift(l.mass, l.com - c_new) + tool.R * inertia * tool.R.transpose() +
                shift(mass, c_p - c_new);
    l.mass = m_new;
    l.com = c_new;
    return out;
  }

  /// Scales every link mass and rotary inertia by @p factor.
  [[nodiscard]] RobotModel with_mass_scale(double factor) const {
    RobotModel out = *this;
    for (auto& l : out.links) {
      l.mass *= factor;
      l.inertia *= factor;
    }
    return out;
  }

  [[nodiscard]] RobotModel without_friction() const {
    RobotModel out = *this;
    for (auto& f : out.friction) f = JointFriction{};
    return out;
  }
};

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

/// Solid rod of length @p len along @p dir (unit) with radius @p r, inertia about its COM.
inline Mat3 rod_inertia(double mass, double len, double r, const Vec3& dir) {
  const double ia = 0.5 * mass * r * r;
  const double it = mass * (3.0 * r * r + len * len) / 12.0;
  return it * Mat3::Identity() + (ia - it) * dir * dir.transpose();
}

/// Planar arm rotating about z, links along local x, gravity along -y by default so that the
/// arm swings in its own plane.
inline RobotModel make_planar_arm(const std::vector<double>& lengths, const std::vector<double>& masses,
                                  bool point_masses = false) {
  if (lengths.size() != masses.size()) throw std::invalid_argument("planar arm: lengths/masses size mismatch");
  RobotModel m;
  m.gravity = Vec3(0.0, -9.81, 0.0);
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    Link l;
    l.name = "link" + std::to_string(i + 1);
    l.origin_xyz = i == 0 ? Vec3::Zero() : Vec3(lengths[i - 1], 0.0, 0.0);
    l.axis = Vec3::UnitZ();
    l.mass = masses[i];
    if (point_masses) {
      l.com = Vec3(lengths[i], 0.0, 0.0);
      l.inertia = 1e-12 * Mat3::Identity();
    } else {
      l.com = Vec3(0.5 * lengths[i], 0.0, 0.0);
      l.inertia = rod_inertia(masses[i], lengths[i], 0.02, Vec3::UnitX());
    }
    m.links.push_back(l);
    m.friction.push_back({});
  }
  m.tool.p = Vec3(lengths.back(), 0.0, 0.0);
  return m;
}

/// Six-joint arm with UR5e-like link lengths and primitive-shape inertias, mounted on top of the
/// base 0.2 m to the left of the base origin and 0.15 m up. With `with_tool`, a 1.2 kg wiping
/// tool (F/T sensor plus pad) sits on the flange and the tool point is the pad surface 0.12 m
/// beyond it.
inline RobotModel make_ur5e_like(bool with_tool = true) {
  const double a[6] = {0.0, -0.425, -0.3922, 0.0, 0.0, 0.0};
  const double d[6] = {0.1625, 0.0, 0.0, 0.1333, 0.0997, 0.0996};
  const double alpha[6] = {M_PI / 2, 0.0, 0.0, M_PI / 2, -M_PI / 2, 0.0};
  const double mass[6] = {3.761, 8.058, 2.846, 1.37, 1.3, 0.365};
  const double radius[6] = {0.06, 0.05, 0.04, 0.035, 0.035, 0.03};
  const double viscous[6] = {0.8, 0.8, 0.5, 0.15, 0.15, 0.15};
  const double coulomb[6] = {1.0, 1.0, 0.6, 0.25, 0.25, 0.25};

  RobotModel m;
  for (int i = 0; i < 6; ++i) {
    Link l;
    l.name = "link" + std::to_string(i + 1);
    if (i > 0) {
      l.origin_xyz = Vec3(a[i - 1], 0.0, d[i - 1]);
      l.origin_rpy = Vec3(alpha[i - 1], 0.0, 0.0);
    }
    l.axis = Vec3::UnitZ();
    l.mass = mass[i];
    const Vec3 span(a[i], 0.0, d[i]);
    l.com = 0.5 * span;
    const double len = span.norm();
    l.inertia = rod_inertia(mass[i], len, radius[i], len > 0.0 ? Vec3(span / len) : Vec3::UnitZ());
    m.links.push_back(l);
    m.friction.push_back({viscous[i], coulomb[i]});
  }
  m.mount.p = Vec3(0.0, 0.2, 0.15);
  m.tool.p = Vec3(a[5], 0.0, d[5]);
  m.tool.R = rot_x(alpha[5]);
  if (!with_tool) return m;
  m.tool.p.z() += 0.12;
  return m.with_payload(1.2, Vec3(0.0, 0.0, -0.06), Vec3(0.008, 0.008, 0.01).asDiagonal());
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::json to_json_vec(const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

inline Vec3 vec3_from_json(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument(field + ": expected array of 3 numbers");
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) throw std::invalid_argument(field + ": expected array of 3 numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

inline nlohmann::json pose_to_json(const Pose& p) {
  return {{"xyz", to_json_vec(p.p)}, {"rpy", to_json_vec(euler_zyx_from_rotation(p.R))}};
}

inline Pose pose_from_json(const nlohmann::json& j, const std::string& field) {
  if (!j.is_object()) throw std::invalid_argument(field + ": expected object with xyz/rpy");
  Pose p;
  if (j.contains("xyz")) p.p = vec3_from_json(j.at("xyz"), field + ".xyz");
  if (j.contains("rpy")) p.R = rotation_from_euler_zyx(vec3_from_json(j.at("rpy"), field + ".rpy"));
  return p;
}

inline double number_field(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw std::invalid_argument(where + "." + key + ": missing");
  if (!j.at(key).is_number()) throw std::invalid_argument(where + "." + key + ": expected number");
  return j.at(key).get<double>();
}

}  // namespace detail

inline nlohmann::json robot_model_to_json(const RobotModel& m) {
  nlohmann::json links = nlohmann::json::array();
  nlohmann::json fr = nlohmann::json::array();
  for (int i = 0; i < m.dof(); ++i) {
    const Link& l = m.links[i];
    nlohmann::json inertia = nlohmann::json::array();
    for (int r = 0; r < 3; ++r) inertia.push_back({l.inertia(r, 0), l.inertia(r, 1), l.inertia(r, 2)});
    links.push_back({{"name", l.name},
                     {"origin", {{"xyz", detail::to_json_vec(l.origin_xyz)}, {"rpy", detail::to_json_vec(l.origin_rpy)}}},
                     {"axis", detail::to_json_vec(l.axis)},
                     {"mass", l.mass},
                     {"com", detail::to_json_vec(l.com)},
                     {"inertia", inertia}});
    fr.push_back({{"viscous", m.friction[i].viscous}, {"coulomb", m.friction[i].coulomb}});
  }
  return {{"links", links},
          {"friction", fr},
          {"mount_transform", detail::pose_to_json(m.mount)},
          {"tool_transform", detail::pose_to_json(m.tool)},
          {"gravity", detail::to_json_vec(m.gravity)}};
}

/// Parses and validates; errors name the offending field.
inline RobotModel robot_model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("robot: expected object");
  if (!j.contains("links") || !j.at("links").is_array()) throw std::invalid_argument("robot.links: expected array");
  RobotModel m;
  const auto& links = j.at("links");
  for (std::size_t i = 0; i < links.size(); ++i) {
    const std::string where = "robot.links[" + std::to_string(i) + "]";
    const auto& lj = links[i];
    if (!lj.is_object()) throw std::invalid_argument(where + ": expected object");
    Link l;
    l.name = lj.value("name", "link" + std::to_string(i + 1));
    if (lj.contains("origin")) {
      const Pose o = detail::pose_from_json(lj.at("origin"), where + ".origin");
      l.origin_xyz = o.p;
      if (lj.at("origin").contains("rpy")) l.origin_rpy = detail::vec3_from_json(lj.at("origin").at("rpy"), where + ".origin.rpy");
    }
    if (lj.contains("axis")) l.axis = detail::vec3_from_json(lj.at("axis"), where + ".axis");
    l.mass = detail::number_field(lj, "mass", where);
    if (lj.contains("com")) l.com = detail::vec3_from_json(lj.at("com"), where + ".com");
    if (!lj.contains("inertia")) throw std::invalid_argument(where + ".inertia: missing");
    const auto& ij = lj.at("inertia");
    if (ij.is_array() && ij.size() == 3 && ij[0].is_number()) {
      l.inertia = detail::vec3_from_json(ij, where + ".inertia").asDiagonal();
    } else if (ij.is_array() && ij.size() == 3) {
      for (int r = 0; r < 3; ++r) l.inertia.row(r) = detail::vec3_from_json(ij[r], where + ".inertia").transpose();
    } else {
      throw std::invalid_argument(where + ".inertia: expected 3 diagonal entries or a 3x3 matrix");
    }
    m.links.push_back(l);
  }
  if (j.contains("friction")) {
    const auto& fj = j.at("friction");
    if (!fj.is_array()) throw std::invalid_argument("robot.friction: expected array");
    for (std::size_t i = 0; i < fj.size(); ++i) {
      if (!fj[i].is_object()) throw std::invalid_argument("robot.friction[" + std::to_string(i) + "]: expected object");
      m.friction.push_back({fj[i].value("viscous", 0.0), fj[i].value("coulomb", 0.0)});
    }
  } else {
    m.friction.assign(m.links.size(), JointFriction{});
  }
  if (j.contains("mount_transform")) m.mount = detail::pose_from_json(j.at("mount_transform"), "robot.mount_transform");
  if (j.contains("tool_transform")) m.tool = detail::pose_from_json(j.at("tool_transform"), "robot.tool_transform");
  if (j.contains("gravity")) m.gravity = detail::vec3_from_json(j.at("gravity"), "robot.gravity");
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("robot.") + e.what());
  }
  return m;
}

}  // namespace mmude
