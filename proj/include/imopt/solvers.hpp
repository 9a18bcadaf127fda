#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "imopt/internal_model.hpp"
#include "imopt/problem.hpp"
#include "imopt/synthesis.hpp"

namespace imopt {

enum class SolverKind { Pogd, Cb, Pcb, Pcbw };

const char* to_string(SolverKind kind);
SolverKind solver_kind_from_string(const std::string& name);

/// Iterate and controller state of an online solver.
///
/// The controller state holds n independent blocks of size m, one per
/// coordinate: column j of `w_state` is block j. Stacking the rows of
/// `w_state` gives the vector acted on by (F kron I_n) in the dense form.
struct SolverState {
  Eigen::MatrixXd w_state;     // m x n
  Eigen::VectorXd x_raw;       // controller output before projection
  Eigen::VectorXd x_feasible;  // projected iterate
  Step step_index = 0;

  /// w_state flattened to the (F kron I_n) ordering: index i*n + j.
  Eigen::VectorXd stacked_w() const;
};

/// Fresh state: x = proj_box(initial_x) (zero when empty), w = 0 with m rows.
SolverState initial_state(Eigen::Index n, Eigen::Index m, const BoxSet& box,
                          const Eigen::VectorXd& initial_x = {});

/// Componentwise clamp, the Euclidean projection onto the box.
Eigen::VectorXd project_box(const Eigen::VectorXd& x, const BoxSet& box);

/// x' <- proj(x' - h * gradient). The controller state is left untouched.
SolverState pogd_step(const SolverState& state, const Eigen::VectorXd& gradient, const BoxSet& box,
                      double h);

/// w <- F w + G g per block, x <- K w, unprojected.
SolverState cb_step(const SolverState& state, const Eigen::VectorXd& gradient,
                    const CompanionRealization& realization, const ControllerGains& gains);

/// cb_step driven by the gradient at the feasible point, output projected.
SolverState pcb_step(const SolverState& state, const Eigen::VectorXd& gradient,
                     const CompanionRealization& realization, const ControllerGains& gains,
                     const BoxSet& box);

/// pcb_step with the anti-windup drive gradient - rho (x' - x).
SolverState pcbw_step(const SolverState& state, const Eigen::VectorXd& gradient,
                      const CompanionRealization& realization, const ControllerGains& gains,
                      const BoxSet& box, double rho);

/// Controller state whose output K w equals x and which is a fixed point of
/// F when F has a root at z = 1: every entry of block j is x_j / sum(K).
/// Falls back to the minimum-norm solution K'x_j / |K|^2 when sum(K) is ~0.
Eigen::MatrixXd seed_controller_state(const ControllerGains& gains, const Eigen::VectorXd& x);

struct SolverConfig {
  SolverKind kind = SolverKind::Pogd;
  double h = 0.0;    // POGD stepsize; 0 -> 2 / (low + high)
  double rho = 1.0;  // anti-windup weight
  std::optional<InternalModel> model;
  std::optional<ControllerGains> gains;  // synthesized from `model` when absent
  SynthesisOptions synthesis;
  Eigen::VectorXd initial_x;  // empty -> 0
  Eigen::MatrixXd initial_w;  // m x n; empty -> 0
};

/// Uniform stepping interface over the four solvers. At step k the solver
/// holds x_k; step() evaluates the gradient of f_k there and produces x_{k+1}
/// projected onto the box of step k + 1.
class OnlineSolver {
 public:
  OnlineSolver(SolverConfig config, const QuadraticProblem& problem);

  const SolverState& state() const { return state_; }
  const SolverConfig& config() const { return config_; }
  const Eigen::VectorXd& iterate() const { return state_.x_feasible; }

  /// `gradient` is grad f_k at iterate(); `next_box` is X_{k+1}.
  void step(const Eigen::VectorXd& gradient, const BoxSet& next_box);

 private:
  SolverConfig config_;
  std::optional<CompanionRealization> realization_;
  SolverState state_;
};

}  // namespace imopt
