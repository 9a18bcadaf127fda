#pragma once

// Brute-force reference computations used only to check the library. They
// share no code with the implementations they check.

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace imopt::reference {

/// Weighted batch least squares for rows phi_i' d ~ y_i with weight
/// alpha^(N-1-i) on row i, solved through a complete orthogonal
/// decomposition of the scaled system.
Eigen::VectorXd weighted_least_squares(const Eigen::MatrixXd& phi_rows, const Eigen::VectorXd& y, double alpha);

/// Minimizer of 1/2 x'Ax + b'x over [lower, upper] found by enumerating every
/// lower/free/upper pattern, solving the reduced equality system and keeping
/// the KKT-feasible candidate with the smallest objective. Exponential in n.
std::optional<Eigen::VectorXd> active_set_enumeration(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                                      const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                                      double tol = 1e-9);

/// Central finite differences of a scalar function.
Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h);

/// Roots of a monic polynomial (ascending coefficients without the leading 1)
/// via the eigenvalues of the transposed companion matrix, built here
/// independently of the library.
Eigen::VectorXcd monic_roots(const std::vector<double>& d);

}  // namespace imopt::reference
