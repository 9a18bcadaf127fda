#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "imopt/oracle.hpp"
#include "imopt/scenario.hpp"
#include "imopt/solvers.hpp"
#include "imopt/supervisor.hpp"

namespace imopt {

enum class AlgorithmKind { Pogd, Cb, Pcb, Pcbw, Psimbo };

const char* to_string(AlgorithmKind kind);
AlgorithmKind algorithm_kind_from_string(const std::string& name);

/// Named internal model as written in config files.
struct ModelSpec {
  std::string kind = "sin_squared";  // step | ramp | sinusoid | sin_squared | custom
  double omega = 10.0;               // sinusoid frequency or sin^2 omega0
  std::vector<double> denominator;   // custom only

  InternalModel build() const;
};

struct AlgorithmSpec {
  std::string name;
  AlgorithmKind kind = AlgorithmKind::Pogd;
  SolverConfig solver;          // POGD / CB / PCB / PCBW
  std::optional<ModelSpec> model;
  SupervisorConfig supervisor;  // P-SIMBO
};

struct OutputConfig {
  std::string directory = "out";
  bool write_csv = true;
  bool write_json = true;
  bool write_summary = true;
};

struct ExperimentConfig {
  ScenarioConfig scenario;
  std::uint64_t seed = 1;
  OracleOptions oracle;
  std::vector<AlgorithmSpec> algorithms;
  OutputConfig output;

  /// Throws std::invalid_argument on an empty algorithm list, duplicate
  /// names, a horizon below 1 or a missing model for CB/PCB/PCBW.
  void validate() const;
};

/// POGD, PCBW with the sin^2 model at omega0 = 10, and P-SIMBO, on the
/// default microgrid scenario.
ExperimentConfig default_experiment();

/// Failure while stepping the experiment; `step()` is the offending k.
class ExperimentError : public std::runtime_error {
 public:
  ExperimentError(Step step, const std::string& what);
  Step step() const { return step_; }

 private:
  Step step_;
};

struct AlgorithmTrace {
  std::string name;
  std::string kind;
  std::vector<Eigen::VectorXd> x;  // x_k as emitted at step k
  std::vector<double> error;       // |x_k - x*_k|_2
  std::vector<double> cumulative;  // prefix sums of error
  std::vector<std::string> phase;  // supervisor phase after step k, "none" otherwise
  std::vector<SupervisorEvent> events;
  std::vector<Eigen::VectorXd> d_hat;  // P-SIMBO only: estimate after step k
  std::uint64_t b_checksum = 0;        // FNV-1a over every b_k consumed
  std::size_t feasibility_violations = 0;
  bool projected = true;
};

struct Trace {
  std::uint64_t seed = 0;
  Eigen::Index n = 0;
  std::vector<Eigen::VectorXd> x_star;
  std::vector<AlgorithmTrace> algorithms;

  Step steps() const { return static_cast<Step>(x_star.size()); }
  const AlgorithmTrace& algorithm(const std::string& name) const;
};

Trace run_experiment(const ExperimentConfig& config);

struct PhaseSwitch {
  Step step = 0;
  std::string phase;
};

struct AlgorithmSummary {
  std::string name;
  double final_cumulative_error = 0.0;
  double best_window_median = 0.0;  // smallest median error over any window
  Step best_window_start = 0;
  std::size_t window = 0;
  std::optional<Step> first_structured;
  std::vector<PhaseSwitch> phase_switches;
  std::vector<SupervisorEvent> events;
  std::size_t feasibility_violations = 0;
};

struct Summary {
  Step steps = 0;
  std::uint64_t seed = 0;
  std::vector<AlgorithmSummary> algorithms;

  const AlgorithmSummary& algorithm(const std::string& name) const;
};

/// Phase switches come from changes of the phase column, so a trace read
/// back from CSV summarizes like the original (events excepted). The window
/// is clipped to the trace length.
Summary summarize(const Trace& trace, std::size_t window = 500);

/// Smallest median over all contiguous windows of the given length, with the
/// start index of that window.
std::pair<double, Step> best_window_median(const std::vector<double>& values, std::size_t window);

}  // namespace imopt
