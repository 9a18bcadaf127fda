#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "imopt/problem.hpp"

namespace imopt {

struct QpSolution {
  Eigen::VectorXd x_star;
  double kkt_residual = 0.0;
  long iterations = 0;
};

class OracleError : public std::runtime_error {
 public:
  OracleError(const std::string& what, QpSolution best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const QpSolution& best() const { return best_; }

 private:
  QpSolution best_;
};

struct OracleOptions {
  double tol = 1e-10;
  long max_iterations = 1'000'000;
};

/// Natural residual |x - proj(x - (Ax + b))|_inf; zero exactly at the minimizer
/// of 1/2 x'Ax + b'x over the box.
double kkt_residual(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const BoxSet& box,
                    const Eigen::VectorXd& x);

/// Minimizer of 1/2 x'Ax + b'x over the box by projected gradient with step
/// 2 / (lambda_min + lambda_max), iterated until kkt_residual <= tol.
/// `start` (projected) is the warm start; empty means the projection of 0.
/// Throws OracleError carrying the best iterate when the cap is hit.
QpSolution solve_box_qp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const BoxSet& box,
                        const OracleOptions& options = {}, const Eigen::VectorXd& start = {});

}  // namespace imopt
