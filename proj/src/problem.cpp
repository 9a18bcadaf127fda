#include "imopt/problem.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace imopt {

BoxSet::BoxSet(Eigen::VectorXd lower, Eigen::VectorXd upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) throw ProblemError("box bounds have different sizes");
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (std::isnan(lower_(i)) || std::isnan(upper_(i)) || !(lower_(i) <= upper_(i))) {
      throw ProblemError("box is empty in coordinate " + std::to_string(i));
    }
  }
}

BoxSet BoxSet::symmetric(Eigen::Index n, double half_width) {
  return BoxSet(Eigen::VectorXd::Constant(n, -half_width), Eigen::VectorXd::Constant(n, half_width));
}

bool BoxSet::contains(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(lower_(i) <= x(i) && x(i) <= upper_(i))) return false;
  }
  return true;
}

SpectralBounds spectrum_of(const Eigen::MatrixXd& symmetric) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetric, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  return {ev.minCoeff(), ev.maxCoeff()};
}

QuadraticProblem::QuadraticProblem(Eigen::MatrixXd hessian, LinearTermSource linear_term,
                                   ConstraintSource constraints, SpectralBounds bounds,
                                   std::optional<Step> horizon)
    : hessian_(std::move(hessian)),
      linear_term_(std::move(linear_term)),
      constraints_(std::move(constraints)),
      bounds_(bounds),
      horizon_(horizon) {
  if (hessian_.rows() == 0 || hessian_.rows() != hessian_.cols()) {
    throw ProblemError("hessian must be a non-empty square matrix");
  }
  if ((hessian_ - hessian_.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw ProblemError("hessian is not symmetric");
  }
  if (!(bounds_.low > 0.0) || !(bounds_.low <= bounds_.high)) {
    throw ProblemError("spectral bounds must satisfy 0 < low <= high");
  }
  const auto spec = spectrum_of(hessian_);
  const double slack = 1e-10 * bounds_.high;
  if (spec.low < bounds_.low - slack || spec.high > bounds_.high + slack) {
    throw ProblemError("hessian spectrum [" + std::to_string(spec.low) + ", " +
                       std::to_string(spec.high) + "] is outside the declared bounds");
  }
  if (!linear_term_ || !constraints_) throw ProblemError("problem sources must be callable");
  if (horizon_ && *horizon_ < 1) throw ProblemError("horizon must be positive");
}

void QuadraticProblem::check_step(Step k) const {
  if (k < 0 || (horizon_ && k >= *horizon_)) {
    throw std::out_of_range("step " + std::to_string(k) + " is outside the problem horizon");
  }
}

Eigen::VectorXd QuadraticProblem::linear_term(Step k) const {
  check_step(k);
  Eigen::VectorXd b = linear_term_(k);
  if (b.size() != dim()) throw ProblemError("linear term has the wrong dimension");
  return b;
}

BoxSet QuadraticProblem::constraints(Step k) const {
  check_step(k);
  BoxSet box = constraints_(k);
  if (box.dim() != dim()) throw ProblemError("constraint set has the wrong dimension");
  return box;
}

double QuadraticProblem::cost(Step k, const Eigen::VectorXd& x) const {
  if (x.size() != dim()) throw ProblemError("point has the wrong dimension");
  return 0.5 * x.dot(hessian_ * x) + x.dot(linear_term(k));
}

Eigen::VectorXd QuadraticProblem::gradient(Step k, const Eigen::VectorXd& x) const {
  if (x.size() != dim()) throw ProblemError("point has the wrong dimension");
  return hessian_ * x + linear_term(k);
}

Eigen::VectorXd eval_gradient(const QuadraticProblem& problem, Step k, const Eigen::VectorXd& x) {
  return problem.gradient(k, x);
}

Eigen::VectorXd triangular_reference(Step k, Step period, double amplitude,
                                     const Eigen::VectorXd& offset) {
  if (period < 2) throw ProblemError("triangular wave period must be at least 2");
  Step phase = k % period;
  if (phase < 0) phase += period;
  const double t = static_cast<double>(phase) / static_cast<double>(period);
  const double tri = t < 0.5 ? 2.0 * t : 2.0 - 2.0 * t;
  return offset + Eigen::VectorXd::Constant(offset.size(), amplitude * tri);
}

}  // namespace imopt
