/**
 * @file ablation.hpp
 * @brief C1-C4 ablation harness: seeded repetitions, parallel execution, mean aggregation,
 * a Table-1-shaped force tracking table and a low-to-high-dynamic degradation summary.
 */
#pragma once

#include "mmude/bench/metrics.hpp"
#include "mmude/sim/record_io.hpp"
#include "mmude/sim/run.hpp"
#include "mmude/sim/scenario_config.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace mmude {

struct AblationSpec {
  std::vector<ScenarioConfig> scenarios;
  std::vector<ControllerKind> controllers;
  int repetitions = 10;
  std::uint64_t seed_base = 1;
  std::string output_dir;        // empty: no files written
  int workers = 1;
  bool write_records = false;    // per-run CSV records (large)
  std::optional<double> physics_dt;  // overrides every scenario's physics step

  void validate() const {
    if (scenarios.empty()) throw ConfigError("scenarios: at least one entry required");
    if (controllers.empty()) throw ConfigError("controllers: at least one entry required");
    if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    for (const auto& s : scenarios)
      if (!s.metrics.force) throw ConfigError("scenarios: \"" + s.name + "\" has no metrics.force_window");
  }
};

/// Parses an ablation spec; scenario paths are resolved against `base_dir`.
inline AblationSpec ablation_spec_from_json(const nlohmann::json& doc, const std::string& base_dir) {
  if (!doc.is_object()) throw ConfigError("ablation spec: expected object");
  static const std::vector<std::string> known = {"scenarios", "controllers", "repetitions", "seed_base", "output_dir",
                                                 "workers", "write_records", "physics_dt", "description"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) throw ConfigError(it.key() + ": unknown field");
  AblationSpec s;
  if (!doc.contains("scenarios") || !doc.at("scenarios").is_array()) throw ConfigError("scenarios: expected array");
  const auto& sc = doc.at("scenarios");
  for (std::size_t i = 0; i < sc.size(); ++i) {
    const std::string where = "scenarios[" + std::to_string(i) + "]";
    if (sc[i].is_string()) {
      std::filesystem::path p = sc[i].get<std::string>();
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      try {
        s.scenarios.push_back(load_scenario(p.string()));
      } catch (const ConfigError& e) {
        throw ConfigError(where + ": " + e.what());
      }
    } else if (sc[i].is_object()) {
      try {
        s.scenarios.push_back(scenario_from_json(sc[i]));
      } catch (const ConfigError& e) {
        throw ConfigError(where + ": " + e.what());
      }
    } else {
      throw ConfigError(where + ": expected path or object");
    }
  }
  if (doc.contains("controllers")) {
    const auto& c = doc.at("controllers");
    if (!c.is_array()) throw ConfigError("controllers: expected array");
    for (std::size_t i = 0; i < c.size(); ++i) {
      const std::string where = "controllers[" + std::to_string(i) + "]";
      if (!c[i].is_string()) throw ConfigError(where + ": expected string");
      const auto k = controller_kind_from_string(c[i].get<std::string>());
      if (!k) throw ConfigError(where + ": unknown controller \"" + c[i].get<std::string>() + "\" (expected C1, C2, C3 or C4)");
      s.controllers.push_back(*k);
    }
  } else {
    s.controllers = {ControllerKind::C1, ControllerKind::C2, ControllerKind::C3, ControllerKind::C4};
  }
  auto integer = [&](const char* key, long long fallback, long long lo) {
    if (!doc.contains(key)) return fallback;
    const auto& v = doc.at(key);
    if (!v.is_number_integer()) throw ConfigError(std::string(key) + ": expected integer");
    if (v.get<long long>() < lo) throw ConfigError(std::string(key) + ": must be >= " + std::to_string(lo));
    return v.get<long long>();
  };
  s.repetitions = static_cast<int>(integer("repetitions", 10, 1));
  s.seed_base = static_cast<std::uint64_t>(integer("seed_base", 1, 0));
  s.workers = static_cast<int>(integer("workers", 1, 1));
  if (doc.contains("output_dir")) {
    if (!doc.at("output_dir").is_string()) throw ConfigError("output_dir: expected string");
    s.output_dir = doc.at("output_dir").get<std::string>();
  }
  if (doc.contains("write_records")) {
    if (!doc.at("write_records").is_boolean()) throw ConfigError("write_records: expected true or false");
    s.write_records = doc.at("write_records").get<bool>();
  }
  if (doc.contains("physics_dt")) {
    if (!doc.at("physics_dt").is_number() || !(doc.at("physics_dt").get<double>() > 0.0))
      throw ConfigError("physics_dt: expected positive number");
    s.physics_dt = doc.at("physics_dt").get<double>();
  }
  s.validate();
  return s;
}

inline AblationSpec load_ablation_spec(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error&) {
    scenario_from_text(read_text_file(path), path);  // rethrows with line and column
  }
  return ablation_spec_from_json(doc, std::filesystem::path(path).parent_path().string());
}

/// Outcome of one (scenario, controller, repetition) run.
struct AblationRun {
  std::string scenario;
  ControllerKind controller = ControllerKind::C1;
  int repetition = 0;
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::ok;
  std::string failure_reason;
  std::optional<ErrorMetrics> force;
  std::optional<Vec6> motion_sse;
  double min_margin = 0.0;
};

/// Mean force metrics of one controller on one scenario.
struct AblationCell {
  int runs = 0;
  int failed = 0;
  int nonconformant = 0;
  double rmse = 0.0, mae = 0.0, sse = 0.0;
  double min_margin = 0.0;
  [[nodiscard]] bool valid() const { return runs > failed; }
};

struct AblationResult {
  std::vector<std::string> scenarios;            // spec order
  std::vector<ControllerKind> controllers;       // table order: C4, C3, C2, C1
  std::vector<AblationRun> runs;                 // sorted by scenario, controller, repetition
  std::vector<std::vector<AblationCell>> cells;  // [scenario][controller]

  [[nodiscard]] const AblationCell& cell(const std::string& scenario, ControllerKind k) const {
    const auto si = std::find(scenarios.begin(), scenarios.end(), scenario) - scenarios.begin();
    const auto ci = std::find(controllers.begin(), controllers.end(), k) - controllers.begin();
    if (si >= static_cast<long>(scenarios.size()) || ci >= static_cast<long>(controllers.size()))
      throw std::out_of_range("ablation: no cell for " + scenario + "/" + to_string(k));
    return cells[si][ci];
  }
};

inline ScenarioConfig ablation_config(const AblationSpec& spec, const ScenarioConfig& base, ControllerKind k, int rep) {
  ScenarioConfig c = base;
  c.controller.kind = k;
  c.seed = spec.seed_base + static_cast<std::uint64_t>(rep);
  if (spec.physics_dt) c.clock.physics_dt = *spec.physics_dt;
  c.source["seed"] = c.seed;
  c.source["controller"]["kind"] = to_string(k);
  if (spec.physics_dt) c.source["clock"]["physics_dt"] = *spec.physics_dt;
  return c;
}

inline std::string run_file_stem(const AblationRun& r) {
  return r.scenario + "_" + to_string(r.controller) + "_r" + std::to_string(r.repetition);
}

inline AblationResult run_ablation(const AblationSpec& spec) {
  spec.validate();
  struct Job {
    std::size_t scenario;
    ControllerKind controller;
    int rep;
  };
  AblationResult res;
  for (const auto& s : spec.scenarios) res.scenarios.push_back(s.name);
  for (ControllerKind k : {ControllerKind::C4, ControllerKind::C3, ControllerKind::C2, ControllerKind::C1})
    if (std::find(spec.controllers.begin(), spec.controllers.end(), k) != spec.controllers.end())
      res.controllers.push_back(k);

  std::vector<Job> jobs;
  for (std::size_t s = 0; s < spec.scenarios.size(); ++s)
    for (ControllerKind k : res.controllers)
      for (int r = 0; r < spec.repetitions; ++r) jobs.push_back({s, k, r});

  if (!spec.output_dir.empty()) std::filesystem::create_directories(std::filesystem::path(spec.output_dir) / "runs");

  std::vector<AblationRun> out(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::string error;
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      try {
        const Job& job = jobs[j];
        const ScenarioConfig c = ablation_config(spec, spec.scenarios[job.scenario], job.controller, job.rep);
        const RunRecord rec = run_scenario(c);
        const RunMetrics m = compute_run_metrics(rec, c);
        AblationRun& r = out[j];
        r.scenario = c.name;
        r.controller = job.controller;
        r.repetition = job.rep;
        r.seed = c.seed;
        r.status = rec.status;
        r.failure_reason = rec.failure_reason;
        r.force = m.force;
        r.motion_sse = m.motion_sse;
        r.min_margin = rec.min_margin;
        if (!spec.output_dir.empty()) {
          const auto base = std::filesystem::path(spec.output_dir) / "runs" / run_file_stem(r);
          write_text_file(base.string() + ".json", record_summary(rec, c).dump(2) + "\n");
          if (spec.write_records) write_text_file(base.string() + ".csv", record_to_csv(rec));
        }
      } catch (const std::exception& e) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (error.empty()) error = e.what();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(spec.workers, static_cast<int>(jobs.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (!error.empty()) throw std::runtime_error("ablation: " + error);

  // jobs were enumerated in (scenario, controller, repetition) order, so `out` is already sorted
  res.runs = std::move(out);
  res.cells.assign(res.scenarios.size(), std::vector<AblationCell>(res.controllers.size()));
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const auto ci = std::find(res.controllers.begin(), res.controllers.end(), jobs[j].controller) - res.controllers.begin();
    AblationCell& cell = res.cells[jobs[j].scenario][ci];
    const AblationRun& r = res.runs[j];
    if (cell.runs == 0 || r.min_margin < cell.min_margin) cell.min_margin = r.min_margin;
    ++cell.runs;
    if (r.status == RunStatus::nonconformant) ++cell.nonconformant;
    if (r.status == RunStatus::failed || !r.force) {
      ++cell.failed;
      continue;
    }
    cell.rmse += r.force->rmse;
    cell.mae += r.force->mae;
    cell.sse += r.force->sse;
  }
  for (auto& row : res.cells)
    for (auto& c : row) {
      const int ok = c.runs - c.failed;
      if (ok > 0) {
        c.rmse /= ok;
        c.mae /= ok;
        c.sse /= ok;
      }
    }
  return res;
}

namespace detail {

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

// Improvement of each metric relative to C4; SSE compares magnitudes.
inline std::optional<std::array<double, 3>> vs_c4(const AblationResult& r, std::size_t s, const AblationCell& c) {
  const auto it = std::find(r.controllers.begin(), r.controllers.end(), ControllerKind::C4);
  if (it == r.controllers.end()) return std::nullopt;
  const AblationCell& ref = r.cells[s][it - r.controllers.begin()];
  if (!ref.valid() || !c.valid()) return std::nullopt;
  return std::array<double, 3>{improvement_percent(c.rmse, ref.rmse), improvement_percent(c.mae, ref.mae),
                               improvement_percent(std::abs(c.sse), std::abs(ref.sse))};
}

inline std::string annotation(const AblationCell& c) {
  std::string a;
  if (c.failed > 0) a += "FAILED " + std::to_string(c.failed) + "/" + std::to_string(c.runs);
  if (c.nonconformant > 0)
    a += (a.empty() ? "" : "; ") + std::string("NONCONFORMANT ") + std::to_string(c.nonconformant) + "/" +
         std::to_string(c.runs);
  return a;
}

}  // namespace detail

/// Wide table CSV: one row per controller (C4, C3, C2, C1), metric and improvement columns per scenario.
inline std::string ablation_table_csv(const AblationResult& r) {
  std::string out = "controller";
  for (const auto& s : r.scenarios)
    for (const char* col : {"rmse", "rmse_improvement_pct", "mae", "mae_improvement_pct", "sse", "sse_improvement_pct",
                            "runs", "failed", "nonconformant", "min_margin"})
      out += "," + s + "_" + col;
  out += '\n';
  for (std::size_t ci = 0; ci < r.controllers.size(); ++ci) {
    out += to_string(r.controllers[ci]);
    for (std::size_t s = 0; s < r.scenarios.size(); ++s) {
      const AblationCell& c = r.cells[s][ci];
      const auto pct = detail::vs_c4(r, s, c);
      auto num = [&](double v) { return c.valid() ? detail::fmt("%.9g", v) : std::string("nan"); };
      auto pc = [&](int i) { return pct ? detail::fmt("%.4f", (*pct)[i]) : std::string(""); };
      out += "," + num(c.rmse) + "," + pc(0) + "," + num(c.mae) + "," + pc(1) + "," + num(c.sse) + "," + pc(2) + "," +
             std::to_string(c.runs) + "," + std::to_string(c.failed) + "," + std::to_string(c.nonconformant) + "," +
             detail::fmt("%.9g", c.min_margin);
    }
    out += '\n';
  }
  return out;
}

/// One line per run, sorted by scenario, controller (table order), repetition.
inline std::string ablation_runs_csv(const AblationResult& r) {
  std::string out = "scenario,controller,repetition,seed,status,force_rmse,force_mae,force_sse,min_margin";
  for (int i = 0; i < 6; ++i) out += ",motion_sse_" + std::to_string(i);
  out += '\n';
  for (const auto& run : r.runs) {
    out += run.scenario + "," + to_string(run.controller) + "," + std::to_string(run.repetition) + "," +
           std::to_string(run.seed) + "," + to_string(run.status);
    for (double v : {run.force ? run.force->rmse : NAN, run.force ? run.force->mae : NAN, run.force ? run.force->sse : NAN,
                     run.min_margin})
      out += "," + detail::fmt("%.9g", v);
    for (int i = 0; i < 6; ++i) out += "," + detail::fmt("%.9g", run.motion_sse ? (*run.motion_sse)[i] : NAN);
    out += '\n';
  }
  return out;
}

/// Percentage change of each controller's RMSE and MAE from the first scenario to each later one.
inline std::string degradation_csv(const AblationResult& r) {
  std::string out = "controller,from,to,rmse_degradation_pct,mae_degradation_pct\n";
  for (std::size_t ci = 0; ci < r.controllers.size(); ++ci)
    for (std::size_t s = 1; s < r.scenarios.size(); ++s) {
      const AblationCell& a = r.cells[0][ci];
      const AblationCell& b = r.cells[s][ci];
      out += std::string(to_string(r.controllers[ci])) + "," + r.scenarios[0] + "," + r.scenarios[s] + ",";
      if (a.valid() && b.valid())
        out += detail::fmt("%.4f", -improvement_percent(b.rmse, a.rmse)) + "," +
               detail::fmt("%.4f", -improvement_percent(b.mae, a.mae));
      else
        out += "nan,nan";
      out += '\n';
    }
  return out;
}

/// Human-readable table: brackets give the improvement over C4.
inline std::string ablation_table_text(const AblationResult& r, int repetitions) {
  std::string out = "Average force tracking performance [N], mean over " + std::to_string(repetitions) +
                    " repetition(s); brackets: improvement vs C4\n\n";
  const std::size_t w0 = 12, w = 20;
  out += detail::pad("", w0);
  for (const auto& s : r.scenarios) out += detail::pad(s, 3 * w);
  out += "\n" + detail::pad("Controller", w0);
  for (std::size_t s = 0; s < r.scenarios.size(); ++s)
    for (const char* m : {"RMSE", "MAE", "SSE"}) out += detail::pad(m, w);
  out += '\n';
  std::vector<std::string> notes;
  for (std::size_t ci = 0; ci < r.controllers.size(); ++ci) {
    const ControllerKind k = r.controllers[ci];
    out += detail::pad(to_string(k), w0);
    for (std::size_t s = 0; s < r.scenarios.size(); ++s) {
      const AblationCell& c = r.cells[s][ci];
      const auto pct = detail::vs_c4(r, s, c);
      const double vals[3] = {c.rmse, c.mae, c.sse};
      for (int i = 0; i < 3; ++i) {
        std::string cellText = c.valid() ? detail::fmt("%.4f", vals[i]) : std::string("FAILED");
        if (pct && k != ControllerKind::C4) cellText += " (" + detail::fmt("%.1f", (*pct)[i]) + "%)";
        out += detail::pad(cellText, w);
      }
      const std::string a = detail::annotation(c);
      if (!a.empty()) notes.push_back(std::string(to_string(k)) + " on " + r.scenarios[s] + ": " + a);
    }
    out += '\n';
  }
  if (r.scenarios.size() > 1) {
    out += "\nDegradation from " + r.scenarios[0] + " (RMSE, MAE):\n";
    for (std::size_t ci = 0; ci < r.controllers.size(); ++ci)
      for (std::size_t s = 1; s < r.scenarios.size(); ++s) {
        const AblationCell& a = r.cells[0][ci];
        const AblationCell& b = r.cells[s][ci];
        out += "  " + detail::pad(to_string(r.controllers[ci]), 4) + " to " + r.scenarios[s] + ": ";
        out += (a.valid() && b.valid()) ? detail::fmt("%+.1f%%", -improvement_percent(b.rmse, a.rmse)) + ", " +
                                              detail::fmt("%+.1f%%", -improvement_percent(b.mae, a.mae))
                                        : std::string("n/a");
        out += '\n';
      }
  }
  if (!notes.empty()) {
    out += "\nAnnotations:\n";
    for (const auto& n : notes) out += "  " + n + "\n";
  }
  return out;
}

inline bool ablation_has_failures(const AblationResult& r) {
  for (const auto& run : r.runs)
    if (run.status == RunStatus::failed) return true;
  return false;
}

/// Writes table CSV/text, per-run CSV and the degradation summary into the spec's output directory.
inline void write_ablation_outputs(const AblationSpec& spec, const AblationResult& r) {
  if (spec.output_dir.empty()) return;
  const std::filesystem::path d(spec.output_dir);
  std::filesystem::create_directories(d);
  write_text_file((d / "ablation_table.csv").string(), ablation_table_csv(r));
  write_text_file((d / "ablation_table.txt").string(), ablation_table_text(r, spec.repetitions));
  write_text_file((d / "ablation_runs.csv").string(), ablation_runs_csv(r));
  write_text_file((d / "degradation.csv").string(), degradation_csv(r));
}

}  // namespace mmude
