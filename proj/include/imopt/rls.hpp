#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace imopt {

/// One scalar observation target = phi' d of the generator recurrence
/// x_{t+m} + d_{m-1} x_{t+m-1} + ... + d_0 x_t = 0, i.e.
/// phi = [x_t, ..., x_{t+m-1}] and target = -x_{t+m}.
struct Regressor {
  Eigen::VectorXd phi;
  double target = 0.0;
};

class InsufficientHistory : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One regressor per (window start t, coordinate j), ordered by t then j.
/// Every history entry must have the same dimension.
std::vector<Regressor> build_regressors(std::span<const Eigen::VectorXd> history, std::size_t m);

struct RlsOptions {
  double alpha = 0.99;           // forgetting factor, in (0, 1]
  double initial_covariance = 1e4;
  std::size_t history_capacity = 4096;
};

/// Forgetting-factor recursive least squares for the internal-model
/// coefficients, plus the record of a-posteriori errors used for settling.
class RlsState {
 public:
  RlsState(std::size_t order, RlsOptions options = {},
           Eigen::VectorXd initial_estimate = {});

  const Eigen::VectorXd& d_hat() const { return d_hat_; }
  const Eigen::MatrixXd& p_matrix() const { return p_; }
  double alpha() const { return options_.alpha; }
  std::size_t order() const { return static_cast<std::size_t>(d_hat_.size()); }
  const RlsOptions& options() const { return options_; }
  const std::deque<double>& error_history() const { return errors_; }
  std::size_t sample_count() const { return samples_; }
  std::size_t covariance_resets() const { return resets_; }

  /// P <- initial_covariance * I, estimate kept.
  void reset_covariance();
  void clear_errors() { errors_.clear(); }
  void push_error(double e);

 private:
  friend struct RlsUpdateAccess;

  RlsOptions options_;
  Eigen::VectorXd d_hat_;
  Eigen::MatrixXd p_;
  std::deque<double> errors_;
  std::size_t samples_ = 0;
  std::size_t resets_ = 0;
};

struct RlsUpdate {
  double a_posteriori_error = 0.0;
  bool covariance_reset = false;
};

/// d <- d + L (y - phi'd), L = P phi / (alpha + phi'P phi),
/// P <- (P - L phi'P) / alpha. Records |y - phi'd_new| in the error history.
/// If P stops being symmetric positive definite, it is reset to
/// initial_covariance * I and the event is flagged.
RlsUpdate rls_update(RlsState& state, const Regressor& reg);

/// Applies the scalar updates of one vector observation in order and records
/// a single history entry: the RMS of the group's residuals evaluated with the
/// estimate after the whole group.
RlsUpdate rls_update_group(RlsState& state, std::span<const Regressor> group);

/// Settling test on the last `window` errors: (max - min) / max(mean, 1e-12)
/// <= rel_tol. False with fewer than `window` samples.
bool is_settled(const std::deque<double>& errors, std::size_t window, double rel_tol);
bool a_posteriori_settled(const RlsState& state, std::size_t window, double rel_tol);

/// (max - min) / max(mean, 1e-12) over the last `window` errors; +inf when
/// fewer samples are available.
double windowed_variation(const std::deque<double>& errors, std::size_t window);

}  // namespace imopt
