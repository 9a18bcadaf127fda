#include "imopt/oracle.hpp"

#include <cassert>
#include <cmath>

#include "imopt/solvers.hpp"

namespace imopt {

double kkt_residual(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const BoxSet& box,
                    const Eigen::VectorXd& x) {
  return (x - project_box(x - (a * x + b), box)).lpNorm<Eigen::Infinity>();
}

QpSolution solve_box_qp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const BoxSet& box,
                        const OracleOptions& options, const Eigen::VectorXd& start) {
  if (a.rows() != a.cols() || a.rows() != b.size() || b.size() != box.dim()) {
    throw std::invalid_argument("box QP dimensions disagree");
  }
  if (!(options.tol > 0.0)) throw std::invalid_argument("oracle tolerance must be positive");
  const auto spec = spectrum_of(a);
  if (!(spec.low > 0.0)) throw std::invalid_argument("box QP Hessian must be positive definite");
  const double step = 2.0 / (spec.low + spec.high);

  QpSolution sol;
  sol.x_star = project_box(start.size() == 0 ? Eigen::VectorXd::Zero(b.size()) : start, box);
  sol.kkt_residual = kkt_residual(a, b, box, sol.x_star);
#ifndef NDEBUG
  auto objective = [&](const Eigen::VectorXd& x) { return 0.5 * x.dot(a * x) + b.dot(x); };
  double previous = objective(sol.x_star);
#endif
  QpSolution best = sol;
  while (sol.kkt_residual > options.tol) {
    if (sol.iterations >= options.max_iterations) {
      throw OracleError("box QP did not reach tolerance; best residual " +
                            std::to_string(best.kkt_residual),
                        best);
    }
    sol.x_star = project_box(sol.x_star - step * (a * sol.x_star + b), box);
    ++sol.iterations;
    sol.kkt_residual = kkt_residual(a, b, box, sol.x_star);
#ifndef NDEBUG
    const double current = objective(sol.x_star);
    assert(current <= previous + 1e-12 * (1.0 + std::abs(previous)));
    previous = current;
#endif
    if (sol.kkt_residual < best.kkt_residual) best = sol;
  }
  return sol;
}

}  // namespace imopt
