// Command-line front end: run experiments, summarize traces, run the
// acceptance checks. Exit codes: 0 success, 1 configuration or usage error,
// 2 runtime failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "acceptance.hpp"
#include "imopt/config.hpp"
#include "imopt/harness.hpp"
#include "imopt/trace_io.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

int cmd_run(const std::string& config_path, const std::string& output_override,
            std::optional<std::uint64_t> seed_override) {
  imopt::ExperimentConfig cfg;
  try {
    cfg = config_path.empty() ? imopt::default_experiment() : imopt::load_experiment_config(config_path);
    if (seed_override) cfg.seed = *seed_override;
    if (!output_override.empty()) cfg.output.directory = output_override;
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    namespace fs = std::filesystem;
    const fs::path out(cfg.output.directory);
    fs::create_directories(out);
    {
      std::ofstream resolved(out / "config.resolved.yaml");
      resolved << imopt::dump_experiment_config(cfg);
    }
    const imopt::Trace trace = imopt::run_experiment(cfg);
    if (cfg.output.write_csv) imopt::write_trace_csv(trace, (out / "trace.csv").string());
    if (cfg.output.write_json) imopt::write_trace_json(trace, (out / "trace.json").string());
    const imopt::Summary summary = imopt::summarize(trace);
    if (cfg.output.write_summary) imopt::write_summary_json(summary, (out / "summary.json").string());
    std::cout << imopt::summary_to_table(summary);
    std::cout << "outputs written to " << out.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}

int cmd_summarize(const std::string& trace_path, std::size_t window, bool as_json) {
  try {
    const imopt::Summary summary = imopt::summarize(imopt::read_trace_csv(trace_path), window);
    std::cout << (as_json ? imopt::summary_to_json(summary) : imopt::summary_to_table(summary));
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}

int cmd_verify(int seeds) {
  imopt::acceptance::Options options;
  options.benchmark_seeds = seeds;
  bool all = true;
  try {
    imopt::acceptance::run_all(options, [&](const imopt::acceptance::CriterionResult& r) {
      all = all && r.passed;
      std::cout << imopt::acceptance::format(r) << std::endl;
    });
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return kRuntimeError;
  }
  return all ? kOk : kRuntimeError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online optimization with identified internal models"};
  app.require_subcommand(1);

  std::string config_path, output_dir;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Run an experiment and export traces");
  run->add_option("config", config_path, "YAML experiment file (defaults when omitted)");
  run->add_option("-o,--output", output_dir, "Output directory (overrides output.directory)");
  run->add_option("-s,--seed", seed, "Scenario seed (overrides seed)");

  std::string trace_path;
  std::size_t window = 500;
  bool as_json = false;
  auto* summarize = app.add_subcommand("summarize", "Summarize a trace CSV");
  summarize->add_option("trace", trace_path, "Trace CSV written by run")->required();
  summarize->add_option("-w,--window", window, "Steady-window length in steps")->check(CLI::PositiveNumber);
  summarize->add_flag("--json", as_json, "Print JSON instead of a table");

  int seeds = 5;
  auto* verify = app.add_subcommand("verify", "Run the acceptance checks");
  verify->add_option("--seeds", seeds, "Benchmark seeds to average over")->check(CLI::Range(1, 100));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  if (*run) return cmd_run(config_path, output_dir, seed);
  if (*summarize) return cmd_summarize(trace_path, window, as_json);
  if (*verify) return cmd_verify(seeds);
  return kConfigError;
}
