/**
 * @file record_io.hpp
 * @brief RunRecord serialization: versioned per-tick CSV and a JSON summary.
 *
 * CSV contract (v1): first line "# mmude run record v1", second line the column header, then
 * one row per control tick. Reals are printed with %.17g so records round-trip exactly.
 */
#pragma once

#include "mmude/sim/run.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace mmude {

inline constexpr const char* kRecordCsvVersion = "# mmude run record v1";

namespace detail {

inline void put_real(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

inline void put_vec(std::string& out, const Eigen::Ref<const VecX>& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out += ',';
    put_real(out, v[i]);
  }
}

inline void put_names(std::string& out, const std::string& stem, int n) {
  for (int i = 0; i < n; ++i) out += "," + stem + std::to_string(i);
}

}  // namespace detail

/// Column names of the record CSV for a `dof`-joint arm.
inline std::string record_csv_header(int dof) {
  std::string h = "t";
  detail::put_names(h, "q", dof);
  detail::put_names(h, "qd", dof);
  detail::put_names(h, "tau", dof);
  for (const char* stem : {"x", "xdot", "xd", "e", "eta", "etadot", "fe", "fe_meas", "fed", "f", "fc", "fu", "kf_term",
                           "mu_c", "interface"})
    detail::put_names(h, std::string(stem) + "_", 6);
  h += ",V,margin,force_axes,saturated,near_singular";
  return h;
}

inline std::string record_to_csv(const RunRecord& rec) {
  std::string out = kRecordCsvVersion;
  out += '\n';
  out += record_csv_header(rec.dof);
  out += '\n';
  for (const RunRow& r : rec.rows) {
    detail::put_real(out, r.t);
    detail::put_vec(out, r.q);
    detail::put_vec(out, r.qd);
    detail::put_vec(out, r.tau);
    for (const Vec6* v : {&r.x, &r.x_dot, &r.x_d, &r.e, &r.eta, &r.eta_dot, &r.f_e, &r.f_e_measured, &r.f_ed, &r.f, &r.f_c,
                          &r.f_u, &r.kf_term, &r.mu_c, &r.interface})
      detail::put_vec(out, *v);
    out += ',';
    detail::put_real(out, r.V);
    out += ',';
    detail::put_real(out, r.margin);
    out += ',' + std::to_string(r.force_axes) + ',' + std::to_string(r.saturated) + ',' +
           std::to_string(r.near_singular ? 1 : 0) + '\n';
  }
  return out;
}

inline nlohmann::json vec_json(const Eigen::Ref<const VecX>& v) {
  std::vector<double> a(v.data(), v.data() + v.size());
  return a;
}

/// Summary: status, stability diagnostics, configured metrics, seed and the configuration echo.
inline nlohmann::json record_summary(const RunRecord& rec, const ScenarioConfig& cfg) {
  nlohmann::json j;
  j["name"] = rec.name;
  j["controller"] = rec.controller;
  j["seed"] = rec.seed;
  j["status"] = to_string(rec.status);
  j["failure_tick"] = rec.failure_tick;
  j["failure_reason"] = rec.failure_reason;
  j["ticks"] = rec.rows.size();
  j["min_margin"] = rec.min_margin;
  j["delta_u"] = vec_json(rec.delta_u);
  j["saturation_steps"] = rec.saturation_steps;
  nlohmann::json m = nlohmann::json::object();
  const RunMetrics rm = compute_run_metrics(rec, cfg);
  if (rm.force) m["force"] = {{"rmse", rm.force->rmse}, {"mae", rm.force->mae}, {"sse", rm.force->sse}};
  if (rm.motion_sse) m["motion_sse"] = vec_json(*rm.motion_sse);
  j["metrics"] = m;
  j["config"] = cfg.source;
  return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot write");
  out << text;
}

}  // namespace mmude
