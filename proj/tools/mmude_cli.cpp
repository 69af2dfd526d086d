// Command-line front end: run, ablate, validate-coupling, filters-check, report.
// Exit status: 0 success, 1 a run FAILED, 2 configuration error.

#include "mmude/bench/ablation.hpp"
#include "mmude/bench/filters_check.hpp"
#include "mmude/sim/record_io.hpp"
#include "mmude/sim/run.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>

using namespace mmude;
namespace fs = std::filesystem;

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitConfig = 2;

int cmd_run(const std::string& path, const std::string& out_dir, std::optional<std::uint64_t> seed,
            const std::string& controller) {
  ScenarioConfig c = load_scenario(path);
  if (seed) {
    c.seed = *seed;
    c.source["seed"] = *seed;
  }
  if (!controller.empty()) {
    const auto k = controller_kind_from_string(controller);
    if (!k) throw ConfigError("--controller: unknown controller \"" + controller + "\"");
    c.controller.kind = *k;
    c.source["controller"]["kind"] = controller;
  }
  const RunRecord rec = run_scenario(c);
  const nlohmann::json summary = record_summary(rec, c);
  fs::create_directories(out_dir);
  const std::string stem = (fs::path(out_dir) / (c.name + "_" + rec.controller + "_s" + std::to_string(c.seed))).string();
  write_text_file(stem + ".csv", record_to_csv(rec));
  write_text_file(stem + ".json", summary.dump(2) + "\n");

  double max_error = 0.0;
  for (const auto& row : rec.rows)
    if (c.metrics.motion_sse && row.t >= c.metrics.motion_sse->start) max_error = std::max(max_error, row.e.cwiseAbs().maxCoeff());
  std::cout << c.name << " " << rec.controller << " seed " << c.seed << ": " << to_string(rec.status);
  if (rec.status == RunStatus::failed)
    std::cout << " at tick " << rec.failure_tick << " (" << rec.failure_reason << ")";
  std::cout << "\n  min dissipation margin " << rec.min_margin << " J\n";
  if (summary["metrics"].contains("force")) {
    const auto& f = summary["metrics"]["force"];
    std::cout << "  force RMSE " << f["rmse"].get<double>() << " N, MAE " << f["mae"].get<double>() << " N, SSE "
              << f["sse"].get<double>() << " N\n";
  }
  if (c.metrics.motion_sse) std::cout << "  max |pose error| in the motion SSE window " << max_error << "\n";
  std::cout << "  wrote " << stem << ".csv and .json\n";
  return rec.status == RunStatus::failed ? kExitFailed : 0;
}

int cmd_ablate(const std::string& path, const std::string& out_dir, int workers) {
  AblationSpec spec = load_ablation_spec(path);
  if (!out_dir.empty()) spec.output_dir = out_dir;
  if (workers > 0) spec.workers = workers;
  const AblationResult r = run_ablation(spec);
  write_ablation_outputs(spec, r);
  std::cout << ablation_table_text(r, spec.repetitions);
  if (!spec.output_dir.empty()) std::cout << "\nwrote tables to " << spec.output_dir << "\n";
  return ablation_has_failures(r) ? kExitFailed : 0;
}

int cmd_validate_coupling(const std::string& path, const std::string& out_dir) {
  const ScenarioConfig c = load_scenario(path);
  const CouplingReport r = coupling_validation_run(c);
  fs::create_directories(out_dir);
  std::string csv = "t";
  for (const char* s : {"predicted_", "measured_"})
    for (int i = 0; i < 6; ++i) csv += std::string(",") + s + std::to_string(i);
  csv += '\n';
  char buf[64];
  for (std::size_t k = 0; k < r.t.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", r.t[k]);
    csv += buf;
    for (const Vec6* v : {&r.predicted[k], &r.measured[k]})
      for (int i = 0; i < 6; ++i) {
        std::snprintf(buf, sizeof buf, ",%.17g", (*v)[i]);
        csv += buf;
      }
    csv += '\n';
  }
  nlohmann::json s;
  s["name"] = c.name;
  s["status"] = to_string(r.status);
  s["rmse"] = vec_json(r.rmse);
  s["mae"] = vec_json(r.mae);
  s["peak_predicted"] = vec_json(r.peak);
  Vec6 rel = Vec6::Zero();
  for (int i = 0; i < 6; ++i) rel[i] = r.peak[i] > 0.0 ? r.rmse[i] / r.peak[i] : 0.0;
  s["rmse_over_peak"] = vec_json(rel);
  s["config"] = c.source;
  const std::string stem = (fs::path(out_dir) / (c.name + "_coupling")).string();
  write_text_file(stem + ".csv", csv);
  write_text_file(stem + ".json", s.dump(2) + "\n");
  std::cout << "axis  RMSE        MAE         peak        RMSE/peak\n";
  for (int i = 0; i < 6; ++i) {
    std::snprintf(buf, sizeof buf, "%d", i);
    std::cout << buf;
    for (double v : {r.rmse[i], r.mae[i], r.peak[i], rel[i]}) {
      std::snprintf(buf, sizeof buf, "  %-10.4g", v);
      std::cout << buf;
    }
    std::cout << "\n";
  }
  std::cout << "status " << to_string(r.status) << "; wrote " << stem << ".csv and .json\n";
  return r.status == RunStatus::failed ? kExitFailed : 0;
}

int cmd_filters_check(const std::string& out_dir, double Ts) {
  fs::create_directories(out_dir);
  std::cout << "filter                        max |step error|\n";
  for (const auto& item : standard_filter_set()) {
    const FilterCheckResult r = check_filter(item, Ts);
    write_text_file((fs::path(out_dir) / (r.name + "_step.csv")).string(), r.step_csv);
    write_text_file((fs::path(out_dir) / (r.name + "_freq.csv")).string(), r.frequency_csv);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-30s%.3e\n", r.name.c_str(), r.max_step_error);
    std::cout << buf;
  }
  std::cout << "wrote step and frequency responses to " << out_dir << "\n";
  return 0;
}

int cmd_report(const std::string& dir) {
  if (!fs::is_directory(dir)) throw ConfigError(dir + ": not a directory");
  std::map<std::string, nlohmann::json> summaries;  // sorted by path
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().extension() != ".json") continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_text_file(e.path().string()));
    } catch (const nlohmann::json::parse_error&) {
      continue;
    }
    if (j.is_object() && j.contains("status") && j.contains("seed") && j.contains("controller"))
      summaries[fs::relative(e.path(), dir).string()] = j;
  }
  int failed = 0;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-20s %-10s %6s %-14s %12s %12s %12s %12s\n", "scenario", "controller", "seed", "status",
                "force_rmse", "force_mae", "force_sse", "min_margin");
  std::cout << buf;
  for (const auto& [path, j] : summaries) {
    const auto& m = j.at("metrics");
    auto num = [&](const char* k) { return m.contains("force") ? m["force"][k].get<double>() : NAN; };
    std::snprintf(buf, sizeof buf, "%-20s %-10s %6llu %-14s %12.5g %12.5g %12.5g %12.4g\n",
                  j.at("name").get<std::string>().c_str(), j.at("controller").get<std::string>().c_str(),
                  static_cast<unsigned long long>(j.at("seed").get<std::uint64_t>()),
                  j.at("status").get<std::string>().c_str(), num("rmse"), num("mae"), num("sse"),
                  j.at("min_margin").get<double>());
    std::cout << buf;
    if (j.at("status") == "FAILED") ++failed;
  }
  std::cout << summaries.size() << " run(s), " << failed << " FAILED\n";
  return failed > 0 ? kExitFailed : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mobile-manipulator UDE motion/force control simulator and ablation harness"};
  app.require_subcommand(1);

  std::string config, out_dir = "out", controller;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Run one scenario; writes the record CSV and summary JSON");
  run->add_option("config", config, "Scenario JSON")->required();
  run->add_option("-o,--out", out_dir, "Output directory");
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--controller", controller, "Override the controller (C1..C4)");

  std::string spec;
  std::string ablate_out;
  int workers = 0;
  auto* ablate = app.add_subcommand("ablate", "Run a C1-C4 ablation; writes table CSV and text");
  ablate->add_option("spec", spec, "Ablation spec JSON")->required();
  ablate->add_option("-o,--out", ablate_out, "Output directory (overrides the spec)");
  ablate->add_option("-j,--workers", workers, "Parallel runs (overrides the spec)")->check(CLI::PositiveNumber);

  auto* coupling = app.add_subcommand("validate-coupling", "Compare the coupling model with the interface sensor");
  coupling->add_option("config", config, "Scenario JSON with a coupling_validation section")->required();
  coupling->add_option("-o,--out", out_dir, "Output directory");

  double Ts = 0.008;
  auto* filters = app.add_subcommand("filters-check", "Discrete filter step/frequency responses against references");
  filters->add_option("-o,--out", out_dir, "Output directory");
  filters->add_option("--ts", Ts, "Sample period [s]")->check(CLI::PositiveNumber);

  std::string report_dir;
  auto* report = app.add_subcommand("report", "Aggregate run summaries found under a directory");
  report->add_option("dir", report_dir, "Directory to scan")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config, out_dir, seed, controller);
    if (*ablate) return cmd_ablate(spec, ablate_out, workers);
    if (*coupling) return cmd_validate_coupling(config, out_dir);
    if (*filters) return cmd_filters_check(out_dir, Ts);
    if (*report) return cmd_report(report_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailed;
  }
  return 0;
}
