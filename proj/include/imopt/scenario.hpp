#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "imopt/problem.hpp"

namespace imopt {

/// Parameters of the microgrid demand-response benchmark. Every field is a
/// config key; defaults reproduce the 6-DER / 2-PCC setup.
struct ScenarioConfig {
  int n = 6;      // controllable DER setpoints
  int y_dim = 2;  // PCCs
  int w_dim = 2;  // uncontrollable loads
  Step horizon = 8000;
  double beta = 1.0;

  // Load w_k = load_amplitude * sin(load_frequency * k) in every coordinate.
  double load_frequency = 0.005;
  double load_amplitude = 1.0;

  // Reference y_ref: triangular wave. Calibration choice, not a measured value.
  Step reference_period = 2000;
  double reference_amplitude = 2.0;
  std::vector<double> reference_offset;  // empty -> zeros

  // Nonzero eigenvalues of J'J and eigenvalues of H are drawn uniformly here.
  double grid_eigen_min = 1.0;
  double grid_eigen_max = 5.0;
  // Eigenvalues of U1 lie in (0, u1_eigen_max].
  double u1_eigen_max = 1.0;

  // u2 and u3 use their first draw in the first and third quarters of the
  // horizon and their second draw otherwise. Disabled -> first draw always.
  bool preference_switching = true;

  std::vector<double> box_lower{-10.0, -6.0, 3.0, 7.0, 0.0, 3.0};
  std::vector<double> box_upper{10.0, 6.0, 13.0, 17.0, 28.0, 32.0};

  SpectralBounds spectral_bounds{1.0, 6.0};
  int max_retries = 32;
};

/// One generated problem instance. Schedules are pure functions of k.
struct Scenario {
  ScenarioConfig config;
  std::uint64_t seed = 0;

  Eigen::MatrixXd j_matrix;   // y_dim x n
  Eigen::MatrixXd h_matrix;   // y_dim x w_dim
  Eigen::MatrixXd u1_matrix;  // n x n
  Eigen::VectorXd u2_first;
  Eigen::VectorXd u2_second;
  double u3_first = 0.0;
  double u3_second = 0.0;
  Eigen::VectorXd box_lower;
  Eigen::VectorXd box_upper;

  Step horizon() const { return config.horizon; }
  Eigen::Index dim() const { return j_matrix.cols(); }

  /// True when the first preference draw is active at step k.
  bool first_preferences_active(Step k) const;

  Eigen::VectorXd load(Step k) const;
  Eigen::VectorXd reference(Step k) const;
  Eigen::VectorXd u2(Step k) const;
  double u3(Step k) const;
  BoxSet box(Step k) const;

  /// Full benchmark cost: 1/2 beta |Jx + Hw - y_ref|^2 + 1/2 x'U1x + x'u2 + u3.
  double cost(Step k, const Eigen::VectorXd& x) const;
};

class ScenarioError : public std::invalid_argument {
 public:
  explicit ScenarioError(const std::string& what) : std::invalid_argument(what) {}
};

/// Draws J, H, U1 and the preference values from a seeded generator. J'J and
/// U1 share an orthonormal eigenbasis so that beta J'J + U1 stays inside the
/// declared spectral bounds; draws are repeated up to max_retries times.
Scenario make_microgrid_scenario(const ScenarioConfig& config, std::uint64_t seed);

/// beta J'(H w_k - y_ref,k) + u2_k.
Eigen::VectorXd linear_term(const Scenario& scenario, Step k);

/// beta J'J + U1.
Eigen::MatrixXd hessian_of(const Scenario& scenario);

/// The time-varying QP seen by the solvers. The scenario is copied into the
/// problem's sources.
QuadraticProblem make_problem(const Scenario& scenario);

/// Writes matrices, preference draws and configuration as JSON. With
/// `include_schedules`, also the per-step load, reference, u2, u3 and b_k.
void export_scenario_json(const Scenario& scenario, const std::string& path,
                          bool include_schedules);

}  // namespace imopt
