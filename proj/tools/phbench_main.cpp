// phbench: run scenarios, recompute metrics from logs, run the self-checks.

#include "phbench/csv_log.hpp"
#include "phbench/errors.hpp"
#include "phbench/scenario.hpp"
#include "phbench/validation.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace phbench;

constexpr int kOk = 0;
constexpr int kCheckFailure = 1;
constexpr int kUsageError = 2;

struct Window {
  double t0 = 0.0;
  double t1 = 0.25;
};

Window parse_window(const std::string& text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("--window expects t0:t1");
  Window w;
  try {
    std::size_t used = 0;
    w.t0 = std::stod(text.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument("t0");
    const std::string rest = text.substr(colon + 1);
    w.t1 = std::stod(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("t1");
  } catch (const std::logic_error&) {
    throw ConfigError("--window expects t0:t1, got '" + text + "'");
  }
  if (!(w.t1 > w.t0)) throw ConfigError("--window needs t1 > t0");
  return w;
}

void print_summary(const std::string& name, const std::filesystem::path& out, std::size_t rows,
                   const MetricsSummary& s) {
  std::printf("scenario        %s\n", name.c_str());
  std::printf("output          %s (%zu rows)\n", out.string().c_str(), rows);
  std::printf("RMS e_step      %.9g W over [%g, %g] s\n", s.rms_e_step, s.window_t0, s.window_t1);
  std::printf("min margin_qs   %.9g J\n", s.min_margin_qs);
  std::printf("min margin_gen  %.9g J\n", s.min_margin_gen);
  std::printf("peak H_Omega    %.9g J\n", s.peak_H_Omega);
}

void write_file(const std::filesystem::path& path, const CsvLayout& layout, const std::vector<LogSample>& log,
                const MetricsSeries& metrics) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  write_csv(out, layout, log, metrics);
  if (!out) throw Error("write failed for " + path.string());
}

struct RunJob {
  ScenarioConfig config;
  std::filesystem::path output;
};

struct RunResult {
  std::size_t rows = 0;
  MetricsSummary summary;
};

RunResult run_job(const RunJob& job, const std::optional<Window>& window) {
  const Scenario& s = job.config.scenario;
  const SimTrajectory traj = run_scenario(s);
  write_file(job.output, CsvLayout::for_models(s.plant, s.controller_model()), traj.log, traj.metrics);
  const double t0 = window ? window->t0 : job.config.window_t0;
  const double t1 = window ? window->t1 : job.config.window_t1;
  return {traj.log.size(), summarize_metrics(traj.metrics, t0, t1)};
}

ScenarioConfig load(const std::string& config, const std::string& preset) {
  if (!preset.empty()) {
    ScenarioConfig cfg;
    cfg.scenario = scenario_preset(preset);
    return cfg;
  }
  if (!std::filesystem::exists(config)) throw ConfigError("config file not found: " + config);
  return load_scenario_config(config);
}

int cmd_run(const std::vector<std::string>& configs, const std::string& preset, const std::string& out,
            const std::string& window_text) {
  const std::optional<Window> window = window_text.empty() ? std::nullopt : std::optional(parse_window(window_text));
  std::vector<RunJob> jobs;
  if (!preset.empty()) jobs.push_back({load("", preset), {}});
  for (const std::string& c : configs) jobs.push_back({load(c, ""), {}});
  if (jobs.empty()) throw ConfigError("run needs --config or --preset");
  if (!out.empty() && jobs.size() > 1) throw ConfigError("--out needs a single scenario");
  for (RunJob& job : jobs) {
    job.output = !out.empty()                   ? std::filesystem::path(out)
                 : !job.config.output.empty() ? job.config.output
                                              : std::filesystem::path(job.config.scenario.name + ".csv");
  }

  // Independent scenarios run concurrently, one writer per output file.
  std::vector<std::future<RunResult>> futures;
  for (const RunJob& job : jobs) futures.push_back(std::async(std::launch::async, run_job, std::cref(job), window));
  int status = kOk;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    try {
      const RunResult r = futures[i].get();
      if (i) std::printf("\n");
      print_summary(jobs[i].config.scenario.name, jobs[i].output, r.rows, r.summary);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "phbench run: %s: %s\n", jobs[i].config.scenario.name.c_str(), e.what());
      status = kCheckFailure;
    }
  }
  return status;
}

int cmd_metrics(const std::string& in_path, const std::string& config, const std::string& preset,
                const std::string& out, const std::string& window_text) {
  const ScenarioConfig cfg = load(config, preset);
  const Window window = window_text.empty() ? Window{cfg.window_t0, cfg.window_t1} : parse_window(window_text);
  std::ifstream in(in_path);
  if (!in) throw ConfigError("cannot read " + in_path);
  const CsvLog csv = read_csv(in);
  const Scenario& s = cfg.scenario;
  if (csv.layout.dof() != s.plant.dof() || csv.layout.task_dim() != s.controller_model().task_dim()) {
    throw SchemaError("log has " + std::to_string(csv.layout.dof()) + " joints / " +
                      std::to_string(csv.layout.task_dim()) + " task rows, the scenario " +
                      std::to_string(s.plant.dof()) + " / " + std::to_string(s.controller_model().task_dim()));
  }
  const MetricsSeries metrics = compute_metrics(csv.log, s.metrics_context());
  if (out.empty()) {
    write_csv(std::cout, csv.layout, csv.log, metrics);
    return kOk;
  }
  write_file(out, csv.layout, csv.log, metrics);
  print_summary(s.name, out, csv.log.size(), summarize_metrics(metrics, window.t0, window.t1));
  return kOk;
}

int cmd_validate(bool inject_fault) {
  ValidationOptions options;
  options.inject_mass_asymmetry = inject_fault;
  const std::vector<CheckResult> results = run_validation_suite(options);
  int failed = 0;
  for (const CheckResult& r : results) {
    std::printf("%-4s  %-58s  %-12.4g <= %g\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.value, r.tolerance);
    failed += r.passed ? 0 : 1;
  }
  std::printf("%zu checks, %d failed\n", results.size(), failed);
  return failed ? kCheckFailure : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Port-Hamiltonian impedance-control benchmark"};
  app.require_subcommand(1);

  std::vector<std::string> configs;
  std::string preset, out, window, in_path, config;
  bool inject_fault = false;

  CLI::App* run = app.add_subcommand("run", "Simulate scenarios and write their CSV logs");
  run->add_option("--config", configs, "Scenario config file (repeatable; runs in parallel)");
  run->add_option("--preset", preset, "Built-in scenario instead of a config file");
  run->add_option("--out", out, "CSV output path (default: config output or <name>.csv)");
  run->add_option("--window", window, "RMS window t0:t1 in seconds (default 0:0.25)");

  CLI::App* metrics = app.add_subcommand("metrics", "Recompute the metric columns of a logged run");
  metrics->add_option("--in", in_path, "Input CSV log")->required();
  metrics->add_option("--config", config, "Scenario config of the logged run");
  metrics->add_option("--preset", preset, "Built-in scenario of the logged run");
  metrics->add_option("--out", out, "Output CSV (default: stdout)");
  metrics->add_option("--window", window, "RMS window t0:t1 in seconds");

  CLI::App* validate = app.add_subcommand("validate", "Run the self-check suite");
  validate->add_flag("--inject-fault", inject_fault, "Corrupt the mass matrix to exercise the failure path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (run->parsed()) return cmd_run(configs, preset, out, window);
    if (metrics->parsed()) {
      if (config.empty() == preset.empty()) throw ConfigError("metrics needs exactly one of --config or --preset");
      return cmd_metrics(in_path, config, preset, out, window);
    }
    return cmd_validate(inject_fault);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "phbench: %s\n", e.what());
    return kUsageError;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "phbench: %s\n", e.what());
    return kUsageError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "phbench: %s\n", e.what());
    return kCheckFailure;
  }
}
