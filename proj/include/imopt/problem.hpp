#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace imopt {

using Step = std::int64_t;

class ProblemError : public std::invalid_argument {
 public:
  explicit ProblemError(const std::string& what) : std::invalid_argument(what) {}
};

/// Closed interval [low, high] enclosing the Hessian spectrum, low > 0.
struct SpectralBounds {
  double low = 1.0;
  double high = 1.0;
};

/// Axis-aligned box {x : lower <= x <= upper}. Never empty.
class BoxSet {
 public:
  BoxSet(Eigen::VectorXd lower, Eigen::VectorXd upper);

  /// Box with bounds at +-half_width in every coordinate.
  static BoxSet symmetric(Eigen::Index n, double half_width);

  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  Eigen::Index dim() const { return lower_.size(); }

  /// Exact membership test (no tolerance).
  bool contains(const Eigen::VectorXd& x) const;

 private:
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
};

/// f_k(x) = 1/2 x'Ax + x'b_k over the box X_k, with a fixed Hessian A and
/// time-indexed sources for b_k and X_k.
class QuadraticProblem {
 public:
  using LinearTermSource = std::function<Eigen::VectorXd(Step)>;
  using ConstraintSource = std::function<BoxSet(Step)>;

  /// Validates symmetry (max |A - A'| <= 1e-12) and that the spectrum of A
  /// lies inside `bounds` with bounds.low > 0.
  QuadraticProblem(Eigen::MatrixXd hessian, LinearTermSource linear_term,
                   ConstraintSource constraints, SpectralBounds bounds,
                   std::optional<Step> horizon = std::nullopt);

  const Eigen::MatrixXd& hessian() const { return hessian_; }
  Eigen::Index dim() const { return hessian_.rows(); }
  SpectralBounds bounds() const { return bounds_; }
  std::optional<Step> horizon() const { return horizon_; }

  Eigen::VectorXd linear_term(Step k) const;
  BoxSet constraints(Step k) const;

  double cost(Step k, const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient(Step k, const Eigen::VectorXd& x) const;

 private:
  void check_step(Step k) const;

  Eigen::MatrixXd hessian_;
  LinearTermSource linear_term_;
  ConstraintSource constraints_;
  SpectralBounds bounds_;
  std::optional<Step> horizon_;
};

/// A x + b_k.
Eigen::VectorXd eval_gradient(const QuadraticProblem& problem, Step k, const Eigen::VectorXd& x);

/// Smallest and largest eigenvalue of a symmetric matrix.
SpectralBounds spectrum_of(const Eigen::MatrixXd& symmetric);

/// offset + amplitude * tri(k mod period), where tri rises linearly 0 -> 1 over
/// the first half-period and falls back to 0 over the second.
Eigen::VectorXd triangular_reference(Step k, Step period, double amplitude,
                                     const Eigen::VectorXd& offset);

}  // namespace imopt
