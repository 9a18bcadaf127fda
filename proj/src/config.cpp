#include "imopt/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace imopt {

namespace {

void check_keys(const YAML::Node& node, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!node.IsMap()) throw ConfigError(where + ": expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read(const YAML::Node& node, const char* key, const std::string& where, T& target) {
  const YAML::Node v = node[key];
  if (!v) return;
  try {
    target = v.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where + "." + key + ": invalid value");
  }
}

template <typename T>
void read_optional(const YAML::Node& node, const char* key, const std::string& where, std::optional<T>& target) {
  const YAML::Node v = node[key];
  if (!v) return;
  if (v.IsNull()) {
    target.reset();
    return;
  }
  T value{};
  read(node, key, where, value);
  target = value;
}

void read_scenario(const YAML::Node& n, ScenarioConfig& c) {
  const std::string w = "scenario";
  check_keys(n, w,
             {"n", "y_dim", "w_dim", "horizon", "beta", "load_frequency", "load_amplitude", "reference_period",
              "reference_amplitude", "reference_offset", "grid_eigen_min", "grid_eigen_max", "u1_eigen_max",
              "preference_switching", "box_lower", "box_upper", "spectral_low", "spectral_high", "max_retries"});
  read(n, "n", w, c.n);
  read(n, "y_dim", w, c.y_dim);
  read(n, "w_dim", w, c.w_dim);
  read(n, "horizon", w, c.horizon);
  read(n, "beta", w, c.beta);
  read(n, "load_frequency", w, c.load_frequency);
  read(n, "load_amplitude", w, c.load_amplitude);
  read(n, "reference_period", w, c.reference_period);
  read(n, "reference_amplitude", w, c.reference_amplitude);
  read(n, "reference_offset", w, c.reference_offset);
  read(n, "grid_eigen_min", w, c.grid_eigen_min);
  read(n, "grid_eigen_max", w, c.grid_eigen_max);
  read(n, "u1_eigen_max", w, c.u1_eigen_max);
  read(n, "preference_switching", w, c.preference_switching);
  read(n, "box_lower", w, c.box_lower);
  read(n, "box_upper", w, c.box_upper);
  read(n, "spectral_low", w, c.spectral_bounds.low);
  read(n, "spectral_high", w, c.spectral_bounds.high);
  read(n, "max_retries", w, c.max_retries);
}

void read_synthesis(const YAML::Node& n, const std::string& w, SynthesisOptions& s) {
  check_keys(n, w, {"grid_points", "scale_candidates", "scale_ratio", "stability_margin"});
  read(n, "grid_points", w, s.grid_points);
  read(n, "scale_candidates", w, s.scale_candidates);
  read(n, "scale_ratio", w, s.scale_ratio);
  read(n, "stability_margin", w, s.stability_margin);
}

void read_supervisor(const YAML::Node& n, const std::string& w, SupervisorConfig& s) {
  check_keys(n, w,
             {"model_order", "settle_window", "settle_rel_tol", "min_phase1_steps", "fallback_error_factor",
              "resynth_cooldown", "anti_windup_enabled", "rho", "pogd_step", "burn_in_extra", "rls", "synthesis"});
  read(n, "model_order", w, s.model_order);
  read(n, "settle_window", w, s.settle_window);
  read(n, "settle_rel_tol", w, s.settle_rel_tol);
  read_optional(n, "min_phase1_steps", w, s.min_phase1_steps);
  read(n, "fallback_error_factor", w, s.fallback_error_factor);
  read(n, "resynth_cooldown", w, s.resynth_cooldown);
  read(n, "anti_windup_enabled", w, s.anti_windup_enabled);
  read(n, "rho", w, s.rho);
  read(n, "pogd_step", w, s.pogd_step);
  read_optional(n, "burn_in_extra", w, s.burn_in_extra);
  if (const auto r = n["rls"]) {
    check_keys(r, w + ".rls", {"alpha", "initial_covariance", "history_capacity"});
    read(r, "alpha", w + ".rls", s.rls.alpha);
    read(r, "initial_covariance", w + ".rls", s.rls.initial_covariance);
    read(r, "history_capacity", w + ".rls", s.rls.history_capacity);
  }
  if (const auto sy = n["synthesis"]) read_synthesis(sy, w + ".synthesis", s.synthesis);
}

ModelSpec read_model(const YAML::Node& n, const std::string& w) {
  check_keys(n, w, {"kind", "omega", "denominator"});
  ModelSpec m;
  read(n, "kind", w, m.kind);
  read(n, "omega", w, m.omega);
  read(n, "denominator", w, m.denominator);
  return m;
}

AlgorithmSpec read_algorithm(const YAML::Node& n, const std::string& w, const SupervisorConfig& base) {
  check_keys(n, w, {"name", "kind", "h", "rho", "model", "synthesis", "supervisor"});
  AlgorithmSpec a;
  std::string kind;
  read(n, "kind", w, kind);
  if (kind.empty()) throw ConfigError(w + ".kind: required");
  try {
    a.kind = algorithm_kind_from_string(kind);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(w + ".kind: " + e.what());
  }
  a.name = kind;
  read(n, "name", w, a.name);
  read(n, "h", w, a.solver.h);
  read(n, "rho", w, a.solver.rho);
  if (const auto m = n["model"]) a.model = read_model(m, w + ".model");
  if (const auto s = n["synthesis"]) read_synthesis(s, w + ".synthesis", a.solver.synthesis);
  a.supervisor = base;
  if (const auto s = n["supervisor"]) {
    if (a.kind != AlgorithmKind::Psimbo) throw ConfigError(w + ".supervisor: only valid for psimbo");
    read_supervisor(s, w + ".supervisor", a.supervisor);
  }
  return a;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("YAML syntax error: ") + e.what());
  }
  ExperimentConfig c = default_experiment();
  if (root.IsNull()) return c;
  check_keys(root, "config", {"seed", "oracle", "scenario", "supervisor", "algorithms", "output"});
  read(root, "seed", "config", c.seed);
  if (const auto o = root["oracle"]) {
    check_keys(o, "oracle", {"tol", "max_iterations"});
    read(o, "tol", "oracle", c.oracle.tol);
    read(o, "max_iterations", "oracle", c.oracle.max_iterations);
  }
  if (const auto s = root["scenario"]) read_scenario(s, c.scenario);
  SupervisorConfig base;
  if (const auto s = root["supervisor"]) read_supervisor(s, "supervisor", base);
  for (auto& a : c.algorithms) a.supervisor = base;
  if (const auto algs = root["algorithms"]) {
    if (!algs.IsSequence()) throw ConfigError("algorithms: expected a list");
    c.algorithms.clear();
    for (std::size_t i = 0; i < algs.size(); ++i) {
      c.algorithms.push_back(read_algorithm(algs[i], "algorithms[" + std::to_string(i) + "]", base));
    }
  }
  if (const auto o = root["output"]) {
    check_keys(o, "output", {"directory", "csv", "json", "summary"});
    read(o, "directory", "output", c.output.directory);
    read(o, "csv", "output", c.output.write_csv);
    read(o, "json", "output", c.output.write_json);
    read(o, "summary", "output", c.output.write_summary);
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

namespace {

void emit_synthesis(YAML::Emitter& e, const SynthesisOptions& s) {
  e << YAML::BeginMap << YAML::Key << "grid_points" << YAML::Value << s.grid_points << YAML::Key
    << "scale_candidates" << YAML::Value << s.scale_candidates << YAML::Key << "scale_ratio" << YAML::Value
    << s.scale_ratio << YAML::Key << "stability_margin" << YAML::Value << s.stability_margin << YAML::EndMap;
}

void emit_supervisor(YAML::Emitter& e, const SupervisorConfig& s) {
  e << YAML::BeginMap;
  e << YAML::Key << "model_order" << YAML::Value << s.model_order;
  e << YAML::Key << "settle_window" << YAML::Value << s.settle_window;
  e << YAML::Key << "settle_rel_tol" << YAML::Value << s.settle_rel_tol;
  e << YAML::Key << "min_phase1_steps" << YAML::Value << s.effective_min_phase1_steps();
  e << YAML::Key << "fallback_error_factor" << YAML::Value << s.fallback_error_factor;
  e << YAML::Key << "resynth_cooldown" << YAML::Value << s.resynth_cooldown;
  e << YAML::Key << "anti_windup_enabled" << YAML::Value << s.anti_windup_enabled;
  e << YAML::Key << "rho" << YAML::Value << s.rho;
  e << YAML::Key << "pogd_step" << YAML::Value << s.pogd_step;
  e << YAML::Key << "burn_in_extra" << YAML::Value << (s.burn_in() - (s.model_order + 1));
  e << YAML::Key << "rls" << YAML::Value << YAML::BeginMap << YAML::Key << "alpha" << YAML::Value << s.rls.alpha
    << YAML::Key << "initial_covariance" << YAML::Value << s.rls.initial_covariance << YAML::Key
    << "history_capacity" << YAML::Value << s.rls.history_capacity << YAML::EndMap;
  e << YAML::Key << "synthesis" << YAML::Value;
  emit_synthesis(e, s.synthesis);
  e << YAML::EndMap;
}

}  // namespace

std::string dump_experiment_config(const ExperimentConfig& c) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "seed" << YAML::Value << c.seed;
  e << YAML::Key << "oracle" << YAML::Value << YAML::BeginMap << YAML::Key << "tol" << YAML::Value << c.oracle.tol
    << YAML::Key << "max_iterations" << YAML::Value << c.oracle.max_iterations << YAML::EndMap;

  const auto& s = c.scenario;
  e << YAML::Key << "scenario" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "n" << YAML::Value << s.n << YAML::Key << "y_dim" << YAML::Value << s.y_dim;
  e << YAML::Key << "w_dim" << YAML::Value << s.w_dim << YAML::Key << "horizon" << YAML::Value << s.horizon;
  e << YAML::Key << "beta" << YAML::Value << s.beta;
  e << YAML::Key << "load_frequency" << YAML::Value << s.load_frequency;
  e << YAML::Key << "load_amplitude" << YAML::Value << s.load_amplitude;
  e << YAML::Key << "reference_period" << YAML::Value << s.reference_period;
  e << YAML::Key << "reference_amplitude" << YAML::Value << s.reference_amplitude;
  e << YAML::Key << "reference_offset" << YAML::Value << YAML::Flow << s.reference_offset;
  e << YAML::Key << "grid_eigen_min" << YAML::Value << s.grid_eigen_min;
  e << YAML::Key << "grid_eigen_max" << YAML::Value << s.grid_eigen_max;
  e << YAML::Key << "u1_eigen_max" << YAML::Value << s.u1_eigen_max;
  e << YAML::Key << "preference_switching" << YAML::Value << s.preference_switching;
  e << YAML::Key << "box_lower" << YAML::Value << YAML::Flow << s.box_lower;
  e << YAML::Key << "box_upper" << YAML::Value << YAML::Flow << s.box_upper;
  e << YAML::Key << "spectral_low" << YAML::Value << s.spectral_bounds.low;
  e << YAML::Key << "spectral_high" << YAML::Value << s.spectral_bounds.high;
  e << YAML::Key << "max_retries" << YAML::Value << s.max_retries;
  e << YAML::EndMap;

  e << YAML::Key << "algorithms" << YAML::Value << YAML::BeginSeq;
  for (const auto& a : c.algorithms) {
    e << YAML::BeginMap;
    e << YAML::Key << "name" << YAML::Value << a.name;
    e << YAML::Key << "kind" << YAML::Value << to_string(a.kind);
    if (a.kind == AlgorithmKind::Psimbo) {
      e << YAML::Key << "supervisor" << YAML::Value;
      emit_supervisor(e, a.supervisor);
    } else {
      e << YAML::Key << "h" << YAML::Value << a.solver.h;
      e << YAML::Key << "rho" << YAML::Value << a.solver.rho;
      if (a.model) {
        e << YAML::Key << "model" << YAML::Value << YAML::BeginMap << YAML::Key << "kind" << YAML::Value
          << a.model->kind << YAML::Key << "omega" << YAML::Value << a.model->omega;
        if (!a.model->denominator.empty()) {
          e << YAML::Key << "denominator" << YAML::Value << YAML::Flow << a.model->denominator;
        }
        e << YAML::EndMap;
      }
      e << YAML::Key << "synthesis" << YAML::Value;
      emit_synthesis(e, a.solver.synthesis);
    }
    e << YAML::EndMap;
  }
  e << YAML::EndSeq;

  e << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "directory" << YAML::Value << c.output.directory;
  e << YAML::Key << "csv" << YAML::Value << c.output.write_csv;
  e << YAML::Key << "json" << YAML::Value << c.output.write_json;
  e << YAML::Key << "summary" << YAML::Value << c.output.write_summary;
  e << YAML::EndMap;
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

}  // namespace imopt
