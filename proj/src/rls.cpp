#include "imopt/rls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Cholesky>

namespace imopt {

std::vector<Regressor> build_regressors(std::span<const Eigen::VectorXd> history, std::size_t m) {
  if (m == 0) throw std::invalid_argument("model order must be positive");
  if (history.size() < m + 1) {
    throw InsufficientHistory("need at least " + std::to_string(m + 1) + " samples, got " +
                              std::to_string(history.size()));
  }
  const Eigen::Index n = history.front().size();
  for (const auto& x : history) {
    if (x.size() != n) throw std::invalid_argument("history entries differ in dimension");
  }
  std::vector<Regressor> out;
  out.reserve((history.size() - m) * static_cast<std::size_t>(n));
  for (std::size_t t = 0; t + m < history.size(); ++t) {
    for (Eigen::Index j = 0; j < n; ++j) {
      Regressor r;
      r.phi.resize(static_cast<Eigen::Index>(m));
      for (std::size_t i = 0; i < m; ++i) r.phi(static_cast<Eigen::Index>(i)) = history[t + i](j);
      r.target = -history[t + m](j);
      out.push_back(std::move(r));
    }
  }
  return out;
}

RlsState::RlsState(std::size_t order, RlsOptions options, Eigen::VectorXd initial_estimate)
    : options_(options) {
  if (order == 0) throw std::invalid_argument("RLS order must be positive");
  if (!(options_.alpha > 0.0 && options_.alpha <= 1.0)) {
    throw std::invalid_argument("forgetting factor must lie in (0, 1]");
  }
  if (!(options_.initial_covariance > 0.0)) throw std::invalid_argument("initial covariance must be positive");
  if (options_.history_capacity == 0) throw std::invalid_argument("error history capacity must be positive");
  const auto m = static_cast<Eigen::Index>(order);
  d_hat_ = initial_estimate.size() == 0 ? Eigen::VectorXd::Zero(m) : std::move(initial_estimate);
  if (d_hat_.size() != m) throw std::invalid_argument("initial estimate has the wrong order");
  p_ = options_.initial_covariance * Eigen::MatrixXd::Identity(m, m);
}

void RlsState::reset_covariance() {
  const auto m = d_hat_.size();
  p_ = options_.initial_covariance * Eigen::MatrixXd::Identity(m, m);
  ++resets_;
}

void RlsState::push_error(double e) {
  errors_.push_back(e);
  while (errors_.size() > options_.history_capacity) errors_.pop_front();
}

struct RlsUpdateAccess {
  // Scalar-observation update; returns whether P had to be reset.
  static bool apply(RlsState& s, const Regressor& reg) {
    if (reg.phi.size() != s.d_hat_.size()) throw std::invalid_argument("regressor has the wrong order");
    const double alpha = s.options_.alpha;
    const Eigen::VectorXd p_phi = s.p_ * reg.phi;
    const double denom = alpha + reg.phi.dot(p_phi);
    const Eigen::VectorXd gain = p_phi / denom;
    s.d_hat_ += gain * (reg.target - reg.phi.dot(s.d_hat_));
    s.p_ = (s.p_ - gain * p_phi.transpose()) / alpha;
    s.p_ = (0.5 * (s.p_ + s.p_.transpose())).eval();
    ++s.samples_;

    bool healthy = s.p_.allFinite() && s.d_hat_.allFinite();
    if (healthy) {
      Eigen::LLT<Eigen::MatrixXd> llt(s.p_);
      healthy = llt.info() == Eigen::Success;
    }
    if (!healthy) {
      if (!s.d_hat_.allFinite()) s.d_hat_.setZero();
      s.reset_covariance();
      return true;
    }
    return false;
  }
};

RlsUpdate rls_update(RlsState& state, const Regressor& reg) {
  RlsUpdate out;
  out.covariance_reset = RlsUpdateAccess::apply(state, reg);
  out.a_posteriori_error = std::abs(reg.target - reg.phi.dot(state.d_hat()));
  state.push_error(out.a_posteriori_error);
  return out;
}

RlsUpdate rls_update_group(RlsState& state, std::span<const Regressor> group) {
  RlsUpdate out;
  if (group.empty()) return out;
  for (const auto& reg : group) out.covariance_reset |= RlsUpdateAccess::apply(state, reg);
  double sq = 0.0;
  for (const auto& reg : group) {
    const double r = reg.target - reg.phi.dot(state.d_hat());
    sq += r * r;
  }
  out.a_posteriori_error = std::sqrt(sq / static_cast<double>(group.size()));
  state.push_error(out.a_posteriori_error);
  return out;
}

double windowed_variation(const std::deque<double>& errors, std::size_t window) {
  if (window == 0 || errors.size() < window) return std::numeric_limits<double>::infinity();
  const auto first = errors.end() - static_cast<std::ptrdiff_t>(window);
  const auto [lo, hi] = std::minmax_element(first, errors.end());
  const double mean = std::accumulate(first, errors.end(), 0.0) / static_cast<double>(window);
  return (*hi - *lo) / std::max(mean, 1e-12);
}

bool is_settled(const std::deque<double>& errors, std::size_t window, double rel_tol) {
  if (window < 2) throw std::invalid_argument("settling window must be at least 2");
  return windowed_variation(errors, window) <= rel_tol;
}

bool a_posteriori_settled(const RlsState& state, std::size_t window, double rel_tol) {
  return is_settled(state.error_history(), window, rel_tol);
}

}  // namespace imopt
