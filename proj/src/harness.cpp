#include "imopt/harness.hpp"

#include <algorithm>
#include <cstring>
#include <memory>
#include <set>

#include <fmt/format.h>

namespace imopt {

const char* to_string(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::Pogd: return "pogd";
    case AlgorithmKind::Cb: return "cb";
    case AlgorithmKind::Pcb: return "pcb";
    case AlgorithmKind::Pcbw: return "pcbw";
    case AlgorithmKind::Psimbo: return "psimbo";
  }
  return "unknown";
}

AlgorithmKind algorithm_kind_from_string(const std::string& name) {
  for (auto k : {AlgorithmKind::Pogd, AlgorithmKind::Cb, AlgorithmKind::Pcb, AlgorithmKind::Pcbw,
                 AlgorithmKind::Psimbo}) {
    if (name == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown algorithm kind '" + name + "'");
}

InternalModel ModelSpec::build() const {
  if (kind == "step") return model_step();
  if (kind == "ramp") return model_ramp();
  if (kind == "sinusoid") return model_sinusoid(omega);
  if (kind == "sin_squared") return model_sin_squared(omega);
  if (kind == "custom") return InternalModel(denominator);
  throw std::invalid_argument("unknown model kind '" + kind + "'");
}

void ExperimentConfig::validate() const {
  if (algorithms.empty()) throw std::invalid_argument("at least one algorithm is required");
  if (scenario.horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (!(oracle.tol > 0.0)) throw std::invalid_argument("oracle tolerance must be positive");
  std::set<std::string> names;
  for (const auto& a : algorithms) {
    if (a.name.empty()) throw std::invalid_argument("algorithm name must not be empty");
    if (a.name.find(',') != std::string::npos) {
      throw std::invalid_argument("algorithm name must not contain commas: " + a.name);
    }
    if (!names.insert(a.name).second) throw std::invalid_argument("duplicate algorithm name " + a.name);
    const bool needs_model = a.kind == AlgorithmKind::Cb || a.kind == AlgorithmKind::Pcb ||
                             a.kind == AlgorithmKind::Pcbw;
    if (needs_model && !a.model && !a.solver.model) {
      throw std::invalid_argument("algorithm " + a.name + " needs an internal model");
    }
  }
}

ExperimentConfig default_experiment() {
  ExperimentConfig c;
  AlgorithmSpec pogd;
  pogd.name = "pogd";
  pogd.kind = AlgorithmKind::Pogd;
  AlgorithmSpec pcbw;
  pcbw.name = "pcbw";
  pcbw.kind = AlgorithmKind::Pcbw;
  pcbw.model = ModelSpec{"sin_squared", 10.0, {}};
  AlgorithmSpec psimbo;
  psimbo.name = "psimbo";
  psimbo.kind = AlgorithmKind::Psimbo;
  c.algorithms = {pogd, pcbw, psimbo};
  return c;
}

ExperimentError::ExperimentError(Step step, const std::string& what)
    : std::runtime_error(fmt::format("step {}: {}", step, what)), step_(step) {}

const AlgorithmTrace& Trace::algorithm(const std::string& name) const {
  for (const auto& a : algorithms) {
    if (a.name == name) return a;
  }
  throw std::out_of_range("trace has no algorithm named " + name);
}

const AlgorithmSummary& Summary::algorithm(const std::string& name) const {
  for (const auto& a : algorithms) {
    if (a.name == name) return a;
  }
  throw std::out_of_range("summary has no algorithm named " + name);
}

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::uint64_t fnv_mix(std::uint64_t h, const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    unsigned char bytes[sizeof(double)];
    const double value = v(i);
    std::memcpy(bytes, &value, sizeof(double));
    for (unsigned char b : bytes) h = (h ^ b) * kFnvPrime;
  }
  return h;
}

// One running algorithm: a plain solver or a supervisor.
struct Runner {
  AlgorithmTrace trace;
  std::unique_ptr<OnlineSolver> solver;
  std::unique_ptr<Supervisor> supervisor;

  const Eigen::VectorXd& iterate() const {
    return supervisor ? supervisor->iterate() : solver->iterate();
  }
};

Runner make_runner(const AlgorithmSpec& spec, const QuadraticProblem& problem) {
  Runner r;
  r.trace.name = spec.name;
  r.trace.kind = to_string(spec.kind);
  r.trace.b_checksum = kFnvOffset;
  if (spec.kind == AlgorithmKind::Psimbo) {
    r.supervisor = std::make_unique<Supervisor>(spec.supervisor, problem);
    return r;
  }
  SolverConfig sc = spec.solver;
  switch (spec.kind) {
    case AlgorithmKind::Pogd: sc.kind = SolverKind::Pogd; break;
    case AlgorithmKind::Cb: sc.kind = SolverKind::Cb; break;
    case AlgorithmKind::Pcb: sc.kind = SolverKind::Pcb; break;
    case AlgorithmKind::Pcbw: sc.kind = SolverKind::Pcbw; break;
    case AlgorithmKind::Psimbo: break;
  }
  if (spec.model && !sc.model) sc.model = spec.model->build();
  r.trace.projected = sc.kind != SolverKind::Cb;
  r.solver = std::make_unique<OnlineSolver>(sc, problem);
  return r;
}

}  // namespace

Trace run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Scenario scenario = make_microgrid_scenario(config.scenario, config.seed);
  const QuadraticProblem problem = make_problem(scenario);
  const Step horizon = scenario.horizon();

  std::vector<Runner> runners;
  runners.reserve(config.algorithms.size());
  for (const auto& spec : config.algorithms) runners.push_back(make_runner(spec, problem));

  Trace trace;
  trace.seed = config.seed;
  trace.n = problem.dim();
  trace.x_star.reserve(static_cast<std::size_t>(horizon));
  for (auto& r : runners) {
    r.trace.x.reserve(static_cast<std::size_t>(horizon));
    r.trace.error.reserve(static_cast<std::size_t>(horizon));
    r.trace.cumulative.reserve(static_cast<std::size_t>(horizon));
    r.trace.phase.reserve(static_cast<std::size_t>(horizon));
  }

  const Eigen::MatrixXd& a = problem.hessian();
  std::optional<BoxSet> box;
  Eigen::VectorXd warm;
  for (Step k = 0; k < horizon; ++k) {
    try {
      const Eigen::VectorXd b = problem.linear_term(k);
      if (!box) box = problem.constraints(k);
      const QpSolution opt = solve_box_qp(a, b, *box, config.oracle, warm);
      warm = opt.x_star;
      trace.x_star.push_back(opt.x_star);
      std::optional<BoxSet> next_box;
      if (k + 1 < horizon) next_box = problem.constraints(k + 1);

      for (auto& r : runners) {
        const Eigen::VectorXd& x = r.iterate();
        const double err = (x - opt.x_star).norm();
        r.trace.x.push_back(x);
        r.trace.error.push_back(err);
        r.trace.cumulative.push_back(r.trace.cumulative.empty() ? err : r.trace.cumulative.back() + err);
        if (r.trace.projected && !box->contains(x)) ++r.trace.feasibility_violations;
        r.trace.b_checksum = fnv_mix(r.trace.b_checksum, b);

        if (next_box) {
          const Eigen::VectorXd g = a * x + b;
          if (r.supervisor) {
            r.supervisor->step(k, g, *next_box);
          } else {
            r.solver->step(g, *next_box);
          }
          if (!r.iterate().allFinite()) throw std::runtime_error(r.trace.name + " produced a non-finite iterate");
        }
        if (r.supervisor) {
          r.trace.phase.emplace_back(to_string(r.supervisor->phase()));
          r.trace.d_hat.push_back(r.supervisor->rls().d_hat());
        } else {
          r.trace.phase.emplace_back("none");
        }
      }
      box = std::move(next_box);
    } catch (const ExperimentError&) {
      throw;
    } catch (const std::exception& e) {
      throw ExperimentError(k, e.what());
    }
  }

  for (auto& r : runners) {
    if (r.trace.b_checksum != runners.front().trace.b_checksum) {
      throw ExperimentError(horizon - 1, "algorithms consumed different linear-term streams");
    }
    if (r.supervisor) r.trace.events = r.supervisor->events();
    trace.algorithms.push_back(std::move(r.trace));
  }
  return trace;
}

namespace {

double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace

std::pair<double, Step> best_window_median(const std::vector<double>& values, std::size_t window) {
  if (values.empty()) throw std::invalid_argument("best_window_median needs values");
  window = std::clamp<std::size_t>(window, 1, values.size());
  double best = 0.0;
  Step best_start = 0;
  for (std::size_t s = 0; s + window <= values.size(); ++s) {
    const double m = median_of(std::vector<double>(values.begin() + static_cast<std::ptrdiff_t>(s),
                                                   values.begin() + static_cast<std::ptrdiff_t>(s + window)));
    if (s == 0 || m < best) {
      best = m;
      best_start = static_cast<Step>(s);
    }
  }
  return {best, best_start};
}

Summary summarize(const Trace& trace, std::size_t window) {
  if (trace.steps() == 0) throw std::invalid_argument("cannot summarize an empty trace");
  Summary s;
  s.steps = trace.steps();
  s.seed = trace.seed;
  for (const auto& a : trace.algorithms) {
    AlgorithmSummary out;
    out.name = a.name;
    out.final_cumulative_error = a.cumulative.back();
    out.window = std::clamp<std::size_t>(window, 1, a.error.size());
    std::tie(out.best_window_median, out.best_window_start) = best_window_median(a.error, out.window);
    std::string previous = a.phase.empty() || a.phase.front() == "none" ? "none" : "warmup";
    for (std::size_t k = 0; k < a.phase.size(); ++k) {
      if (a.phase[k] != previous) {
        out.phase_switches.push_back(PhaseSwitch{static_cast<Step>(k), a.phase[k]});
        if (a.phase[k] == "structured" && !out.first_structured) out.first_structured = static_cast<Step>(k);
        previous = a.phase[k];
      }
    }
    out.events = a.events;
    out.feasibility_violations = a.feasibility_violations;
    s.algorithms.push_back(std::move(out));
  }
  return s;
}

}  // namespace imopt
