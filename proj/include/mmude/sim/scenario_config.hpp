/**
 * @file scenario_config.hpp
 * @brief Declarative run description and its versioned JSON form.
 *
 * Every parse or validation failure throws ConfigError naming the offending field; syntax
 * errors carry the line and column of the document.
 */
#pragma once

#include "mmude/control/controller.hpp"
#include "mmude/control/impedance.hpp"
#include "mmude/core/types.hpp"
#include "mmude/kinodyn/robot_model.hpp"
#include "mmude/world/base_trajectory.hpp"
#include "mmude/world/sensors.hpp"
#include "mmude/world/wall.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmude {

inline constexpr int kScenarioSchemaVersion = 1;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Integrator { rk4, semi_implicit_euler };

inline const char* to_string(Integrator i) { return i == Integrator::rk4 ? "rk4" : "semi_implicit_euler"; }

struct SimClock {
  double physics_dt = 1e-3;
  double control_dt = 8e-3;
  double duration = 70.0;

  [[nodiscard]] int ratio() const { return static_cast<int>(std::lround(control_dt / physics_dt)); }
  [[nodiscard]] long physics_ticks() const { return std::lround(duration / physics_dt); }

  void validate() const {
    if (!(physics_dt > 0.0)) throw ConfigError("clock.physics_dt must be > 0");
    if (!(control_dt > 0.0)) throw ConfigError("clock.control_dt must be > 0");
    if (!(duration > 0.0)) throw ConfigError("duration must be > 0");
    const double r = control_dt / physics_dt;
    if (r < 1.0 - 1e-9 || std::abs(r - std::round(r)) > 1e-6)
      throw ConfigError("clock.control_dt must be an integer multiple of clock.physics_dt");
  }
};

/// Model differences between the simulated plant and the controller's nominal model.
struct PlantMismatch {
  bool friction = true;
  double friction_scale = 1.0;      // multiplies the model's joint friction coefficients
  double payload_mass = 0.0;
  Vec3 payload_com = Vec3::Zero();  // tool frame
  double mass_scale = 1.0;
};

/// Piecewise-linear desired contact force: each ramp moves linearly to `value` over [start, end].
struct ForceRamp {
  double start = 0.0, end = 0.0, value = 0.0;
};

struct ForcePhase {
  int axis = 1;
  double mode_start = 3.0;
  double mode_end = 55.0;  // switch back to full motion control
  std::vector<ForceRamp> ramps;
};

struct Approach {
  double start = 1.0;
  double duration = 2.0;
  double target = 0.8;  // coordinate along the force axis held during the force phase
};

struct SineSegment {
  int axis = 2;
  double start = 20.0, end = 52.0;
  double amplitude = 0.1;
  double omega = 0.125 * M_PI;
};

struct TaskSchedule {
  Vec3 start_position = Vec3(0.1, 0.77, 0.8);
  Vec3 start_rpy = Vec3(-M_PI / 2.0, 0.0, 0.0);
  VecX ik_seed;
  double initial_perturbation = 0.0;  // uniform per-axis offset of the start pose [m]
  bool follow_base_x = false;
  std::optional<Approach> approach;
  std::optional<ForcePhase> force;
  std::optional<SineSegment> sine;
  double retract_duration = 2.0;
};

struct Disturbance {
  enum class Kind { none, pulse, sinusoid };
  Kind kind = Kind::none;
  Vec6 wrench = Vec6::Zero();
  double start = 0.0, duration = 0.0, omega = 0.0;

  /// Wrench applied at the end effector in {i}.
  [[nodiscard]] Vec6 at(double t) const {
    switch (kind) {
      case Kind::none: return Vec6::Zero();
      case Kind::pulse: return (t >= start && t < start + duration) ? wrench : Vec6::Zero();
      case Kind::sinusoid: return t >= start ? Vec6(wrench * std::sin(omega * (t - start))) : Vec6::Zero();
    }
    return Vec6::Zero();
  }
};

struct Window {
  double start = 0.0, end = 0.0;
  [[nodiscard]] bool contains(double t) const { return t >= start - 1e-9 && t <= end + 1e-9; }
};

struct MetricWindows {
  std::optional<Window> force;
  std::optional<Window> force_sse;
  std::optional<Window> motion_sse;
};

struct CouplingValidation {
  bool enabled = false;
  VecX joints;
  Vec6 kp = (Vec6() << 400, 400, 300, 100, 100, 50).finished();
  Vec6 kd = (Vec6() << 40, 40, 30, 10, 10, 5).finished();
};

struct ScenarioConfig {
  int schema_version = kScenarioSchemaVersion;
  std::string name = "scenario";
  std::uint64_t seed = 1;
  SimClock clock;
  Integrator integrator = Integrator::rk4;
  RobotModel robot = make_ur5e_like();
  PlantMismatch plant;
  ControllerConfig controller;
  BaseTrajectory base;
  std::optional<WallModel> wall;
  SensorSuite sensors;
  TaskSchedule task;
  Disturbance disturbance;
  MetricWindows metrics;
  CouplingValidation coupling;
  nlohmann::json source = nlohmann::json::object();

  /// Model the simulated plant integrates.
  [[nodiscard]] RobotModel plant_model() const {
    RobotModel m = robot;
    if (plant.mass_scale != 1.0) m = m.with_mass_scale(plant.mass_scale);
    if (plant.payload_mass > 0.0) m = m.with_payload(plant.payload_mass, plant.payload_com);
    if (!plant.friction) return m.without_friction();
    for (auto& f : m.friction) {
      f.viscous *= plant.friction_scale;
      f.coulomb *= plant.friction_scale;
    }
    return m;
  }

  void validate() const {
    if (schema_version != kScenarioSchemaVersion)
      throw ConfigError("schema_version: unsupported version " + std::to_string(schema_version));
    clock.validate();
    try {
      robot.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("robot.") + e.what());
    }
    const int n = robot.dof();
    if (!(plant.mass_scale > 0.0)) throw ConfigError("plant.mass_scale must be > 0");
    if (!(plant.friction_scale >= 0.0)) throw ConfigError("plant.friction_scale must be >= 0");
    if (plant.payload_mass < 0.0) throw ConfigError("plant.payload_mass must be >= 0");
    try {
      controller.gains.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("controller.gains: ") + e.what());
    }
    if (controller.torque_limit.size() != 0 && controller.torque_limit.size() != n)
      throw ConfigError("controller.torque_limit: expected " + std::to_string(n) + " entries");
    if (controller.torque_limit.size() != 0 && (controller.torque_limit.array() <= 0.0).any())
      throw ConfigError("controller.torque_limit: entries must be > 0");
    if (std::abs(controller.Ts - clock.control_dt) > 1e-12)
      throw ConfigError("controller sample period must equal clock.control_dt");
    for (int i = 0; i < 6; ++i)
      if (!(controller.cutoffs[i] > 0.0)) throw ConfigError("controller.cutoffs: entries must be > 0");
    try {
      base.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    if (wall) {
      try {
        wall->validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
    try {
      sensors.validate(clock.physics_dt);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    if (task.ik_seed.size() != n) throw ConfigError("task.ik_seed: expected " + std::to_string(n) + " entries");
    if (task.initial_perturbation < 0.0) throw ConfigError("task.initial_perturbation must be >= 0");
    if (task.approach && !(task.approach->duration > 0.0)) throw ConfigError("task.approach.duration must be > 0");
    if (task.force) {
      const auto& f = *task.force;
      if (f.axis < 0 || f.axis > 5) throw ConfigError("task.force.axis must be in [0, 5]");
      if (!(f.mode_end > f.mode_start)) throw ConfigError("task.force.mode_end must exceed mode_start");
      double last = f.mode_start;
      for (std::size_t i = 0; i < f.ramps.size(); ++i) {
        const auto& r = f.ramps[i];
        const std::string where = "task.force.ramps[" + std::to_string(i) + "]";
        if (r.start < last - 1e-12 || r.end < r.start) throw ConfigError(where + ": ramps must be ordered and non-overlapping");
        if (!std::isfinite(r.value)) throw ConfigError(where + ".value must be finite");
        last = r.end;
      }
      if (controller.gains.Kf[f.axis] == 0.0) throw ConfigError("controller.gains.Kf: force axis gain must be nonzero");
    }
    if (task.sine && !(task.sine->end > task.sine->start)) throw ConfigError("task.sine.end must exceed start");
    if (!(task.retract_duration > 0.0)) throw ConfigError("task.retract_duration must be > 0");
    auto check_window = [&](const std::optional<Window>& w, const char* name) {
      if (!w) return;
      if (!(w->end > w->start) || w->start < 0.0 || w->end > clock.duration + 1e-9)
        throw ConfigError(std::string("metrics.") + name + ": window must be non-empty and within the run duration");
    };
    check_window(metrics.force, "force_window");
    check_window(metrics.force_sse, "force_sse_window");
    check_window(metrics.motion_sse, "motion_sse_window");
    if ((metrics.force || metrics.force_sse) && !task.force)
      throw ConfigError("metrics.force_window requires task.force");
    if (coupling.enabled && coupling.joints.size() != n)
      throw ConfigError("coupling_validation.joints: expected " + std::to_string(n) + " entries");
  }
};

namespace detail {

/// Field reader that prefixes every error with the dotted path of the field.
class JsonReader {
 public:
  JsonReader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected object");
  }

  [[nodiscard]] std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  [[nodiscard]] bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  [[nodiscard]] const nlohmann::json& at(const std::string& key) const { return j_.at(key); }

  void allow_only(std::initializer_list<const char*> keys) const {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!ok.count(it.key())) throw ConfigError(field(it.key()) + ": unknown field");
  }

  [[nodiscard]] double number(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    if (!has(key)) {
      if (fallback) return *fallback;
      throw ConfigError(field(key) + ": missing");
    }
    if (!j_.at(key).is_number()) throw ConfigError(field(key) + ": expected number");
    const double v = j_.at(key).get<double>();
    if (!std::isfinite(v)) throw ConfigError(field(key) + ": must be finite");
    return v;
  }

  [[nodiscard]] bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_boolean()) throw ConfigError(field(key) + ": expected true or false");
    return j_.at(key).get<bool>();
  }

  [[nodiscard]] std::string text(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_string()) throw ConfigError(field(key) + ": expected string");
    return j_.at(key).get<std::string>();
  }

  [[nodiscard]] VecX vector(const std::string& key, int size) const {
    if (!has(key)) throw ConfigError(field(key) + ": missing");
    const auto& a = j_.at(key);
    if (!a.is_array() || (size >= 0 && static_cast<int>(a.size()) != size))
      throw ConfigError(field(key) + ": expected array of " + (size >= 0 ? std::to_string(size) : "") + " numbers");
    VecX v(static_cast<int>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i].is_number()) throw ConfigError(field(key) + "[" + std::to_string(i) + "]: expected number");
      v[static_cast<int>(i)] = a[i].get<double>();
    }
    return v;
  }

  [[nodiscard]] Vec6 vec6(const std::string& key, const Vec6& fallback) const {
    return has(key) ? Vec6(vector(key, 6)) : fallback;
  }
  [[nodiscard]] Vec3 vec3(const std::string& key, const Vec3& fallback) const {
    return has(key) ? Vec3(vector(key, 3)) : fallback;
  }

  [[nodiscard]] JsonReader child(const std::string& key) const { return JsonReader(j_.at(key), field(key)); }

 private:
  const nlohmann::json& j_;
  std::string path_;
};

inline int axis_index(const std::string& s, const std::string& field) {
  static const char* names[] = {"x", "y", "z", "roll", "pitch", "yaw"};
  for (int i = 0; i < 6; ++i)
    if (s == names[i]) return i;
  throw ConfigError(field + ": expected one of x, y, z, roll, pitch, yaw");
}

inline const char* axis_name(int i) {
  static const char* names[] = {"x", "y", "z", "roll", "pitch", "yaw"};
  return names[i];
}

inline TransferFunction tf_from_json(const nlohmann::json& j, const std::string& field) {
  if (j.is_string()) {
    if (j == "bandpass") return bandpass_gf1();
    if (j == "lowpass") return lowpass_gf1();
    throw ConfigError(field + ": expected \"bandpass\", \"lowpass\" or {num, den}");
  }
  JsonReader r(j, field);
  r.allow_only({"num", "den"});
  const VecX num = r.vector("num", -1), den = r.vector("den", -1);
  TransferFunction tf{Poly(num.data(), num.data() + num.size()), Poly(den.data(), den.data() + den.size())};
  if (!tf.proper()) throw ConfigError(field + ": transfer function must be proper");
  return tf;
}

inline BaseTrajectory base_from_json(const JsonReader& r) {
  r.allow_only({"initial_position", "initial_yaw", "segments"});
  BaseTrajectory t;
  t.initial_position = r.vec3("initial_position", Vec3::Zero());
  t.initial_yaw = r.number("initial_yaw", 0.0);
  if (r.has("segments")) {
    const auto& segs = r.at("segments");
    if (!segs.is_array()) throw ConfigError(r.field("segments") + ": expected array");
    for (std::size_t i = 0; i < segs.size(); ++i) {
      const JsonReader s(segs[i], r.field("segments") + "[" + std::to_string(i) + "]");
      s.allow_only({"kind", "axis", "speed", "amplitude", "omega", "phase", "start", "ramp"});
      BaseSegment seg;
      const std::string kind = s.text("kind", "");
      if (kind == "hold") seg.kind = BaseSegment::Kind::hold;
      else if (kind == "constant_velocity") seg.kind = BaseSegment::Kind::constant_velocity;
      else if (kind == "sinusoid") seg.kind = BaseSegment::Kind::sinusoid;
      else throw ConfigError(s.field("kind") + ": expected hold, constant_velocity or sinusoid");
      const std::string axis = s.text("axis", "x");
      if (axis == "x") seg.axis = BaseAxis::x;
      else if (axis == "y") seg.axis = BaseAxis::y;
      else if (axis == "z") seg.axis = BaseAxis::z;
      else if (axis == "yaw") seg.axis = BaseAxis::yaw;
      else throw ConfigError(s.field("axis") + ": expected x, y, z or yaw");
      seg.speed = s.number("speed", 0.0);
      seg.amplitude = s.number("amplitude", 0.0);
      seg.omega = s.number("omega", 0.0);
      seg.phase = s.number("phase", 0.0);
      seg.start = s.number("start", 0.0);
      seg.ramp = s.number("ramp", 0.0);
      t.segments.push_back(seg);
    }
  }
  return t;
}

inline WrenchSensorConfig sensor_from_json(const JsonReader& r) {
  r.allow_only({"sigma", "bias", "rate_hz"});
  WrenchSensorConfig c;
  c.sigma = r.number("sigma", 0.0);
  c.bias = r.vec6("bias", Vec6::Zero());
  c.rate_hz = r.number("rate_hz", 0.0);
  return c;
}

inline std::optional<Window> window_from_json(const JsonReader& r, const std::string& key) {
  if (!r.has(key)) return std::nullopt;
  const VecX v = r.vector(key, 2);
  return Window{v[0], v[1]};
}

}  // namespace detail

inline ScenarioConfig scenario_from_json(const nlohmann::json& doc) {
  using detail::JsonReader;
  const JsonReader r(doc, "");
  r.allow_only({"schema_version", "name", "seed", "duration", "clock", "integrator", "robot", "plant", "controller",
                "base", "wall", "sensors", "task", "disturbance", "metrics", "coupling_validation", "description"});
  ScenarioConfig c;
  c.source = doc;
  if (!r.has("schema_version")) throw ConfigError("schema_version: missing");
  c.schema_version = static_cast<int>(r.number("schema_version"));
  if (c.schema_version != kScenarioSchemaVersion)
    throw ConfigError("schema_version: unsupported version " + std::to_string(c.schema_version));
  c.name = r.text("name", c.name);
  const double seed = r.number("seed", 1.0);
  if (seed < 0.0 || seed != std::floor(seed)) throw ConfigError("seed: expected non-negative integer");
  c.seed = static_cast<std::uint64_t>(seed);
  c.clock.duration = r.number("duration", c.clock.duration);
  if (r.has("clock")) {
    const auto k = r.child("clock");
    k.allow_only({"physics_dt", "control_dt"});
    c.clock.physics_dt = k.number("physics_dt", c.clock.physics_dt);
    c.clock.control_dt = k.number("control_dt", c.clock.control_dt);
  }
  const std::string integ = r.text("integrator", "rk4");
  if (integ == "rk4") c.integrator = Integrator::rk4;
  else if (integ == "semi_implicit_euler") c.integrator = Integrator::semi_implicit_euler;
  else throw ConfigError("integrator: expected rk4 or semi_implicit_euler");

  if (r.has("robot")) {
    const auto& rj = r.at("robot");
    if (rj.is_object() && rj.contains("preset")) {
      if (rj.at("preset") != "ur5e_like") throw ConfigError("robot.preset: expected \"ur5e_like\"");
    } else {
      try {
        c.robot = robot_model_from_json(rj);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
  }
  const int n = c.robot.dof();

  if (r.has("plant")) {
    const auto p = r.child("plant");
    p.allow_only({"friction", "friction_scale", "payload_mass", "payload_com", "mass_scale"});
    c.plant.friction = p.boolean("friction", true);
    c.plant.friction_scale = p.number("friction_scale", 1.0);
    c.plant.payload_mass = p.number("payload_mass", 0.0);
    c.plant.payload_com = p.vec3("payload_com", Vec3::Zero());
    c.plant.mass_scale = p.number("mass_scale", 1.0);
  }

  c.controller.Ts = c.clock.control_dt;
  if (r.has("controller")) {
    const auto k = r.child("controller");
    k.allow_only({"kind", "gains", "gf1", "cutoffs", "coupling_discretization", "damping", "torque_limit", "clamp",
                  "anti_windup"});
    const std::string kind = k.text("kind", "C1");
    const auto parsed = controller_kind_from_string(kind);
    if (!parsed) throw ConfigError(k.field("kind") + ": unknown controller \"" + kind + "\" (expected C1, C2, C3 or C4)");
    c.controller.kind = *parsed;
    if (k.has("gains")) {
      const auto g = k.child("gains");
      g.allow_only({"Kd", "Cd", "Kf", "preset"});
      const std::string preset = g.text("preset", "simulation");
      if (preset == "simulation") c.controller.gains = ImpedanceParams::simulation_defaults();
      else if (preset == "experiment") c.controller.gains = ImpedanceParams::experiment_defaults();
      else throw ConfigError(g.field("preset") + ": expected simulation or experiment");
      c.controller.gains.Kd = g.vec6("Kd", c.controller.gains.Kd);
      c.controller.gains.Cd = g.vec6("Cd", c.controller.gains.Cd);
      c.controller.gains.Kf = g.vec6("Kf", c.controller.gains.Kf);
    }
    if (k.has("gf1")) c.controller.gf1 = detail::tf_from_json(k.at("gf1"), k.field("gf1"));
    if (k.has("cutoffs")) {
      const Vec6 w = k.vec6("cutoffs", Vec6::Zero());
      for (int i = 0; i < 6; ++i) c.controller.cutoffs[i] = w[i];
    }
    const std::string disc = k.text("coupling_discretization", "triangle_hold");
    if (disc == "triangle_hold") c.controller.coupling_discretization = Discretization::triangle_hold;
    else if (disc == "tustin") c.controller.coupling_discretization = Discretization::tustin;
    else throw ConfigError(k.field("coupling_discretization") + ": expected triangle_hold or tustin");
    c.controller.damping = k.number("damping", kDefaultDamping);
    if (k.has("torque_limit")) c.controller.torque_limit = k.vector("torque_limit", n);
    const std::string clamp = k.text("clamp", "excluding_gravity");
    if (clamp == "excluding_gravity") c.controller.clamp = TorqueClamp::excluding_gravity;
    else if (clamp == "total") c.controller.clamp = TorqueClamp::total;
    else throw ConfigError(k.field("clamp") + ": expected excluding_gravity or total");
    c.controller.anti_windup = k.boolean("anti_windup", true);
  }

  if (r.has("base")) c.base = detail::base_from_json(r.child("base"));

  if (r.has("wall")) {
    const auto w = r.child("wall");
    w.allow_only({"enabled", "preset", "y", "stiffness", "damping", "friction", "slip_smoothing"});
    if (w.boolean("enabled", true)) {
      const std::string preset = w.text("preset", "compliant");
      const double y = w.number("y", 0.8);
      WallModel m;
      if (preset == "compliant") m = WallModel::compliant(y);
      else if (preset == "rigid") m = WallModel::rigid(y);
      else throw ConfigError(w.field("preset") + ": expected compliant or rigid");
      m.stiffness = w.number("stiffness", m.stiffness);
      m.damping = w.number("damping", m.damping);
      m.friction = w.number("friction", m.friction);
      m.slip_smoothing = w.number("slip_smoothing", m.slip_smoothing);
      c.wall = m;
    }
  }

  if (r.has("sensors")) {
    const auto s = r.child("sensors");
    s.allow_only({"force_torque", "interface", "encoders"});
    if (s.has("force_torque")) c.sensors.force_torque = detail::sensor_from_json(s.child("force_torque"));
    if (s.has("interface")) c.sensors.interface = detail::sensor_from_json(s.child("interface"));
    if (s.has("encoders")) {
      const auto e = s.child("encoders");
      e.allow_only({"quantization"});
      c.sensors.encoders.quantization = e.number("quantization", 0.0);
    }
  }

  c.task.ik_seed = VecX::Zero(n);
  if (n == 6) c.task.ik_seed << 1.57, -1.7, -1.5, 0.1, 1.5, 0.0;
  if (r.has("task")) {
    const auto t = r.child("task");
    t.allow_only({"start_position", "start_rpy", "ik_seed", "initial_perturbation", "follow_base_x", "approach", "force",
                  "sine", "retract_duration"});
    c.task.start_position = t.vec3("start_position", c.task.start_position);
    c.task.start_rpy = t.vec3("start_rpy", c.task.start_rpy);
    if (t.has("ik_seed")) c.task.ik_seed = t.vector("ik_seed", n);
    c.task.initial_perturbation = t.number("initial_perturbation", 0.0);
    c.task.follow_base_x = t.boolean("follow_base_x", false);
    c.task.retract_duration = t.number("retract_duration", c.task.retract_duration);
    if (t.has("approach")) {
      const auto a = t.child("approach");
      a.allow_only({"start", "duration", "target"});
      Approach ap;
      ap.start = a.number("start", ap.start);
      ap.duration = a.number("duration", ap.duration);
      ap.target = a.number("target", ap.target);
      c.task.approach = ap;
    }
    if (t.has("force")) {
      const auto f = t.child("force");
      f.allow_only({"axis", "mode_start", "mode_end", "ramps"});
      ForcePhase fp;
      fp.axis = detail::axis_index(f.text("axis", "y"), f.field("axis"));
      fp.mode_start = f.number("mode_start", fp.mode_start);
      fp.mode_end = f.number("mode_end", fp.mode_end);
      if (f.has("ramps")) {
        const auto& ramps = f.at("ramps");
        if (!ramps.is_array()) throw ConfigError(f.field("ramps") + ": expected array");
        for (std::size_t i = 0; i < ramps.size(); ++i) {
          const JsonReader rr(ramps[i], f.field("ramps") + "[" + std::to_string(i) + "]");
          rr.allow_only({"start", "end", "value"});
          fp.ramps.push_back({rr.number("start"), rr.number("end"), rr.number("value")});
        }
      }
      c.task.force = fp;
    }
    if (t.has("sine")) {
      const auto s = t.child("sine");
      s.allow_only({"axis", "start", "end", "amplitude", "omega"});
      SineSegment sn;
      sn.axis = detail::axis_index(s.text("axis", "z"), s.field("axis"));
      sn.start = s.number("start", sn.start);
      sn.end = s.number("end", sn.end);
      sn.amplitude = s.number("amplitude", sn.amplitude);
      sn.omega = s.number("omega", sn.omega);
      c.task.sine = sn;
    }
  }

  if (r.has("disturbance")) {
    const auto d = r.child("disturbance");
    d.allow_only({"kind", "wrench", "start", "duration", "omega"});
    const std::string kind = d.text("kind", "none");
    if (kind == "none") c.disturbance.kind = Disturbance::Kind::none;
    else if (kind == "pulse") c.disturbance.kind = Disturbance::Kind::pulse;
    else if (kind == "sinusoid") c.disturbance.kind = Disturbance::Kind::sinusoid;
    else throw ConfigError(d.field("kind") + ": expected none, pulse or sinusoid");
    c.disturbance.wrench = d.vec6("wrench", Vec6::Zero());
    c.disturbance.start = d.number("start", 0.0);
    c.disturbance.duration = d.number("duration", 0.0);
    c.disturbance.omega = d.number("omega", 0.0);
  }

  if (r.has("metrics")) {
    const auto m = r.child("metrics");
    m.allow_only({"force_window", "force_sse_window", "motion_sse_window"});
    c.metrics.force = detail::window_from_json(m, "force_window");
    c.metrics.force_sse = detail::window_from_json(m, "force_sse_window");
    c.metrics.motion_sse = detail::window_from_json(m, "motion_sse_window");
  }

  if (r.has("coupling_validation")) {
    const auto v = r.child("coupling_validation");
    v.allow_only({"enabled", "joints", "kp", "kd"});
    c.coupling.enabled = v.boolean("enabled", true);
    if (v.has("joints")) c.coupling.joints = v.vector("joints", n);
    c.coupling.kp = v.vec6("kp", c.coupling.kp);
    c.coupling.kd = v.vec6("kd", c.coupling.kd);
  }

  c.validate();
  return c;
}

/// Parses text, converting syntax errors into line/column diagnostics.
inline ScenarioConfig scenario_from_text(const std::string& text, const std::string& origin = "config") {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
  return scenario_from_json(doc);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ScenarioConfig load_scenario(const std::string& path) { return scenario_from_text(read_text_file(path), path); }

}  // namespace mmude
