#include "imopt/supervisor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace imopt {

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::WarmUp: return "warmup";
    case Phase::Structured: return "structured";
    case Phase::Fallback: return "fallback";
  }
  return "unknown";
}

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::EnterStructured: return "enter_structured";
    case EventKind::DriftDetected: return "drift_detected";
    case EventKind::Resynthesized: return "resynthesized";
    case EventKind::Fallback: return "fallback";
    case EventKind::SynthesisFailed: return "synthesis_failed";
    case EventKind::CovarianceReset: return "covariance_reset";
  }
  return "unknown";
}

std::size_t SupervisorConfig::burn_in() const {
  return (model_order + 1) + burn_in_extra.value_or(2 * model_order);
}

Step SupervisorConfig::effective_min_phase1_steps() const {
  if (min_phase1_steps) return *min_phase1_steps;
  return static_cast<Step>(2 * (model_order + 1) + burn_in());
}

namespace {

void validate(const SupervisorConfig& c) {
  if (c.model_order == 0) throw std::invalid_argument("supervisor model order must be positive");
  if (c.settle_window < 2) throw std::invalid_argument("settle window must be at least 2");
  if (!(c.settle_rel_tol > 0.0)) throw std::invalid_argument("settle tolerance must be positive");
  if (!(c.fallback_error_factor > 1.0)) throw std::invalid_argument("fallback factor must exceed 1");
  if (c.resynth_cooldown < 0) throw std::invalid_argument("resynthesis cooldown must be non-negative");
  if (!(c.rho >= 0.0)) throw std::invalid_argument("anti-windup weight must be non-negative");
  if (c.rls.history_capacity < c.settle_window) {
    throw std::invalid_argument("RLS error history is shorter than the settle window");
  }
}

}  // namespace

Supervisor::Supervisor(SupervisorConfig config, const QuadraticProblem& problem, Synthesizer synthesizer)
    : config_(std::move(config)),
      bounds_(problem.bounds()),
      synthesizer_(std::move(synthesizer)),
      rls_(config_.model_order, config_.rls) {
  validate(config_);
  if (config_.pogd_step == 0.0) config_.pogd_step = 2.0 / (bounds_.low + bounds_.high);
  if (!(config_.pogd_step > 0.0 && config_.pogd_step < 2.0 / bounds_.high)) {
    throw std::invalid_argument("gradient step must lie in (0, 2 / lambda_high)");
  }
  if (!synthesizer_) {
    const SynthesisOptions opts = config_.synthesis;
    synthesizer_ = [opts](const InternalModel& m, SpectralBounds b) { return synthesize(m, b, opts); };
  }
  const auto m = static_cast<Eigen::Index>(config_.model_order);
  solver_ = initial_state(problem.dim(), m, problem.constraints(0));
  window_.push_back(solver_.x_feasible);
}

void Supervisor::log(Step k, EventKind kind, std::string detail) {
  events_.push_back(SupervisorEvent{k, kind, std::move(detail)});
}

void Supervisor::step(Step k, const Eigen::VectorXd& gradient, const BoxSet& next_box) {
  if (k != next_step_) {
    throw std::logic_error(fmt::format("supervisor expected step {}, got {}", next_step_, k));
  }
  const Eigen::VectorXd previous = solver_.x_feasible;
  if (phase_ == Phase::Structured) {
    const double rho = config_.anti_windup_enabled ? config_.rho : 0.0;
    solver_ = pcbw_step(solver_, gradient, *realization_, *gains_, next_box, rho);
  } else {
    solver_ = pogd_step(solver_, gradient, next_box, config_.pogd_step);
  }
  last_change_ = (solver_.x_feasible - previous).norm();
  ++next_step_;

  identify(k);
  evaluate_transitions(k);
}

void Supervisor::identify(Step k) {
  const std::size_t m = config_.model_order;
  window_.push_back(solver_.x_feasible);
  ++samples_seen_;
  while (window_.size() > m + 1) window_.pop_front();
  if (window_.size() < m + 1) return;
  // Oldest iterate in the regression window; skip the initial transient.
  const Step start = samples_seen_ - static_cast<Step>(m);
  if (start < static_cast<Step>(config_.burn_in())) return;

  const std::vector<Eigen::VectorXd> history(window_.begin(), window_.end());
  const auto group = build_regressors(history, m);
  const auto update = rls_update_group(rls_, group);
  if (update.covariance_reset) {
    log(k, EventKind::CovarianceReset, "RLS covariance lost positive definiteness and was reset");
  }
}

double Supervisor::recent_median_error() const {
  const auto& errors = rls_.error_history();
  const std::size_t w = std::min(config_.settle_window, errors.size());
  if (w == 0) return 0.0;
  std::vector<double> tail(errors.end() - static_cast<std::ptrdiff_t>(w), errors.end());
  const auto mid = tail.begin() + static_cast<std::ptrdiff_t>(w / 2);
  std::nth_element(tail.begin(), mid, tail.end());
  return *mid;
}

bool Supervisor::try_install(Step k, EventKind on_success) {
  std::vector<double> d(rls_.d_hat().data(), rls_.d_hat().data() + rls_.d_hat().size());
  try {
    InternalModel model = stabilized_model(d);
    ControllerGains gains = synthesizer_(model, bounds_);
    if (!(gains.certified_radius < 1.0)) {
      throw SynthesisFailed(fmt::format("controller certified radius {:.4g} is not below 1", gains.certified_radius));
    }
    realization_ = companion_realization(model);
    model_ = std::move(model);
    gains_ = std::move(gains);
  } catch (const std::exception& e) {
    log(k, EventKind::SynthesisFailed, e.what());
    retry_after_ = k + static_cast<Step>(config_.settle_window);
    if (phase_ != Phase::Fallback) enter_fallback(k, "synthesis failed");
    return false;
  }
  // Start the controller at rest on the current iterate instead of w = 0,
  // which would restart the output at the origin.
  solver_.w_state = seed_controller_state(*gains_, solver_.x_feasible);
  solver_.x_raw = solver_.x_feasible;
  phase_ = Phase::Structured;
  last_switch_ = k;
  drift_armed_ = false;
  retry_after_.reset();
  installed_error_ = std::max(recent_median_error(), 1e-12);
  log(k, on_success,
      fmt::format("radius {:.4g}, scale {:.4g}, d = [{:.6g}]", gains_->certified_radius,
                  gains_->gain_scale, fmt::join(model_->denominator(), ", ")));
  return true;
}

void Supervisor::enter_fallback(Step k, const std::string& reason) {
  phase_ = Phase::Fallback;
  last_switch_ = k;
  drift_armed_ = false;
  log(k, EventKind::Fallback, reason);
}

void Supervisor::evaluate_transitions(Step k) {
  const auto& errors = rls_.error_history();
  const std::size_t window = config_.settle_window;
  const bool settled = is_settled(errors, window, config_.settle_rel_tol);
  const bool retry_blocked = retry_after_ && k < *retry_after_;

  switch (phase_) {
    case Phase::WarmUp:
    case Phase::Fallback:
      if (settled && !retry_blocked && k >= config_.effective_min_phase1_steps()) {
        try_install(k, EventKind::EnterStructured);
      }
      return;
    case Phase::Structured: break;
  }

  // The switch itself perturbs the iterate sequence, so the first window
  // after it is neither drift nor failure evidence. Its median becomes the
  // reference level for the fallback test.
  const Step since_switch = k - last_switch_;
  const auto w = static_cast<Step>(window);
  if (since_switch < w) return;
  if (since_switch == w) {
    installed_error_ = std::max(recent_median_error(), 1e-12);
    return;
  }
  if (since_switch >= 2 * w) {
    const double median = recent_median_error();
    if (median > config_.fallback_error_factor * installed_error_) {
      rls_.reset_covariance();
      enter_fallback(k, fmt::format("median identification error {:.3g} exceeds {:.3g} x {:.3g}",
                                    median, config_.fallback_error_factor, installed_error_));
      return;
    }
  }
  if (!drift_armed_) {
    const double variation = windowed_variation(errors, window);
    if (variation > 2.0 * config_.settle_rel_tol) {
      drift_armed_ = true;
      log(k, EventKind::DriftDetected, fmt::format("windowed variation {:.3g}", variation));
    }
    return;
  }
  if (settled && !retry_blocked && since_switch >= config_.resynth_cooldown) {
    try_install(k, EventKind::Resynthesized);
  }
}

Eigen::VectorXd simbo_step(Supervisor& sup, const QuadraticProblem& problem, Step k) {
  if (problem.horizon() && k + 1 >= *problem.horizon()) return sup.iterate();
  const Eigen::VectorXd g = problem.gradient(k, sup.iterate());
  sup.step(k, g, problem.constraints(k + 1));
  return sup.iterate();
}

}  // namespace imopt
