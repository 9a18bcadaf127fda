#include "imopt/solvers.hpp"

#include <cmath>
#include <stdexcept>

namespace imopt {

const char* to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::Pogd: return "pogd";
    case SolverKind::Cb: return "cb";
    case SolverKind::Pcb: return "pcb";
    case SolverKind::Pcbw: return "pcbw";
  }
  return "unknown";
}

SolverKind solver_kind_from_string(const std::string& name) {
  if (name == "pogd") return SolverKind::Pogd;
  if (name == "cb") return SolverKind::Cb;
  if (name == "pcb") return SolverKind::Pcb;
  if (name == "pcbw") return SolverKind::Pcbw;
  throw std::invalid_argument("unknown solver kind '" + name + "'");
}

Eigen::VectorXd SolverState::stacked_w() const {
  const Eigen::Index m = w_state.rows();
  const Eigen::Index n = w_state.cols();
  Eigen::VectorXd out(m * n);
  for (Eigen::Index i = 0; i < m; ++i) out.segment(i * n, n) = w_state.row(i).transpose();
  return out;
}

Eigen::VectorXd project_box(const Eigen::VectorXd& x, const BoxSet& box) {
  if (x.size() != box.dim()) throw std::invalid_argument("projection dimension mismatch");
  return x.cwiseMax(box.lower()).cwiseMin(box.upper());
}

SolverState initial_state(Eigen::Index n, Eigen::Index m, const BoxSet& box,
                          const Eigen::VectorXd& initial_x) {
  SolverState s;
  s.w_state = Eigen::MatrixXd::Zero(m, n);
  s.x_raw = initial_x.size() == 0 ? Eigen::VectorXd::Zero(n) : initial_x;
  if (s.x_raw.size() != n) throw std::invalid_argument("initial point has the wrong dimension");
  s.x_feasible = project_box(s.x_raw, box);
  s.x_raw = s.x_feasible;
  return s;
}

SolverState pogd_step(const SolverState& state, const Eigen::VectorXd& gradient, const BoxSet& box,
                      double h) {
  if (!(h > 0.0)) throw std::invalid_argument("POGD stepsize must be positive");
  SolverState next = state;
  next.x_feasible = project_box(state.x_feasible - h * gradient, box);
  next.x_raw = next.x_feasible;
  ++next.step_index;
  return next;
}

namespace {

// One controller update with the given drive signal: per block
// w_j <- F w_j + G u_j, then x_j = K w_j.
void advance_controller(SolverState& s, const Eigen::VectorXd& drive,
                        const CompanionRealization& realization, const ControllerGains& gains) {
  const Eigen::Index m = realization.f_matrix.rows();
  const Eigen::Index n = drive.size();
  if (s.w_state.rows() != m || s.w_state.cols() != n) {
    throw std::invalid_argument("controller state does not match model order and dimension");
  }
  if (static_cast<Eigen::Index>(gains.k_row.size()) != m) {
    throw std::invalid_argument("gain row does not match model order");
  }
  s.w_state = (realization.f_matrix * s.w_state + realization.g_vector * drive.transpose()).eval();
  s.x_raw = (gains.effective_row() * s.w_state).transpose();
  ++s.step_index;
}

}  // namespace

SolverState cb_step(const SolverState& state, const Eigen::VectorXd& gradient,
                    const CompanionRealization& realization, const ControllerGains& gains) {
  SolverState next = state;
  advance_controller(next, gradient, realization, gains);
  next.x_feasible = next.x_raw;
  return next;
}

SolverState pcb_step(const SolverState& state, const Eigen::VectorXd& gradient,
                     const CompanionRealization& realization, const ControllerGains& gains,
                     const BoxSet& box) {
  SolverState next = state;
  advance_controller(next, gradient, realization, gains);
  next.x_feasible = project_box(next.x_raw, box);
  return next;
}

SolverState pcbw_step(const SolverState& state, const Eigen::VectorXd& gradient,
                      const CompanionRealization& realization, const ControllerGains& gains,
                      const BoxSet& box, double rho) {
  if (!(rho >= 0.0)) throw std::invalid_argument("anti-windup weight must be non-negative");
  if (rho == 0.0) return pcb_step(state, gradient, realization, gains, box);
  SolverState next = state;
  const Eigen::VectorXd drive = gradient - rho * (state.x_feasible - state.x_raw);
  advance_controller(next, drive, realization, gains);
  next.x_feasible = project_box(next.x_raw, box);
  return next;
}

Eigen::MatrixXd seed_controller_state(const ControllerGains& gains, const Eigen::VectorXd& x) {
  const Eigen::RowVectorXd k = gains.effective_row();
  const Eigen::Index m = k.size();
  const double sum = k.sum();
  if (std::abs(sum) > 1e-8 * std::max(1.0, k.cwiseAbs().sum())) {
    return Eigen::VectorXd::Ones(m) * (x.transpose() / sum);
  }
  const double norm2 = k.squaredNorm();
  if (norm2 == 0.0) return Eigen::MatrixXd::Zero(m, x.size());
  return k.transpose() * (x.transpose() / norm2);
}

OnlineSolver::OnlineSolver(SolverConfig config, const QuadraticProblem& problem)
    : config_(std::move(config)) {
  const auto bounds = problem.bounds();
  if (config_.h == 0.0) config_.h = 2.0 / (bounds.low + bounds.high);
  if (!(config_.h > 0.0 && config_.h < 2.0 / bounds.high)) {
    throw std::invalid_argument("POGD stepsize must lie in (0, 2 / lambda_high)");
  }
  if (!(config_.rho >= 0.0)) throw std::invalid_argument("anti-windup weight must be non-negative");

  Eigen::Index m = 1;
  if (config_.kind != SolverKind::Pogd) {
    if (!config_.model) throw std::invalid_argument("control-based solvers need an internal model");
    realization_ = companion_realization(*config_.model);
    if (!config_.gains) config_.gains = synthesize(*config_.model, bounds, config_.synthesis);
    m = static_cast<Eigen::Index>(config_.model->order());
  }
  const BoxSet box0 = problem.constraints(0);
  if (config_.kind == SolverKind::Cb) {
    // The unprojected solver starts from the raw initial point.
    state_ = initial_state(problem.dim(), m, BoxSet::symmetric(problem.dim(), INFINITY),
                           config_.initial_x);
  } else {
    state_ = initial_state(problem.dim(), m, box0, config_.initial_x);
  }
  if (config_.initial_w.size() != 0) {
    if (config_.initial_w.rows() != m || config_.initial_w.cols() != problem.dim()) {
      throw std::invalid_argument("initial controller state must be m x n");
    }
    state_.w_state = config_.initial_w;
  }
}

void OnlineSolver::step(const Eigen::VectorXd& gradient, const BoxSet& next_box) {
  switch (config_.kind) {
    case SolverKind::Pogd:
      state_ = pogd_step(state_, gradient, next_box, config_.h);
      break;
    case SolverKind::Cb:
      state_ = cb_step(state_, gradient, *realization_, *config_.gains);
      break;
    case SolverKind::Pcb:
      state_ = pcb_step(state_, gradient, *realization_, *config_.gains, next_box);
      break;
    case SolverKind::Pcbw:
      state_ = pcbw_step(state_, gradient, *realization_, *config_.gains, next_box, config_.rho);
      break;
  }
}

}  // namespace imopt
