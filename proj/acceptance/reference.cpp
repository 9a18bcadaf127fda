#include "reference.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace imopt::reference {

Eigen::VectorXd weighted_least_squares(const Eigen::MatrixXd& phi_rows, const Eigen::VectorXd& y, double alpha) {
  const Eigen::Index n = phi_rows.rows();
  Eigen::MatrixXd a = phi_rows;
  Eigen::VectorXd r = y;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = std::sqrt(std::pow(alpha, static_cast<double>(n - 1 - i)));
    a.row(i) *= s;
    r(i) *= s;
  }
  return a.completeOrthogonalDecomposition().solve(r);
}

std::optional<Eigen::VectorXd> active_set_enumeration(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                                      const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                                      double tol) {
  const Eigen::Index n = b.size();
  if (n > 12) throw std::invalid_argument("enumeration is limited to n <= 12");
  long patterns = 1;
  for (Eigen::Index i = 0; i < n; ++i) patterns *= 3;

  std::optional<Eigen::VectorXd> best;
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<int> state(static_cast<std::size_t>(n));
  for (long p = 0; p < patterns; ++p) {
    long code = p;
    std::vector<Eigen::Index> free;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      state[static_cast<std::size_t>(i)] = static_cast<int>(code % 3);  // 0 lower, 1 free, 2 upper
      code /= 3;
      if (state[static_cast<std::size_t>(i)] == 0) x(i) = lower(i);
      if (state[static_cast<std::size_t>(i)] == 2) x(i) = upper(i);
      if (state[static_cast<std::size_t>(i)] == 1) free.push_back(i);
    }
    if (!free.empty()) {
      const auto nf = static_cast<Eigen::Index>(free.size());
      Eigen::MatrixXd aff(nf, nf);
      Eigen::VectorXd rhs(nf);
      for (Eigen::Index r = 0; r < nf; ++r) {
        double s = -b(free[static_cast<std::size_t>(r)]);
        for (Eigen::Index j = 0; j < n; ++j) {
          if (state[static_cast<std::size_t>(j)] != 1) s -= a(free[static_cast<std::size_t>(r)], j) * x(j);
        }
        rhs(r) = s;
        for (Eigen::Index c = 0; c < nf; ++c) {
          aff(r, c) = a(free[static_cast<std::size_t>(r)], free[static_cast<std::size_t>(c)]);
        }
      }
      const Eigen::VectorXd xf = aff.ldlt().solve(rhs);
      for (Eigen::Index r = 0; r < nf; ++r) x(free[static_cast<std::size_t>(r)]) = xf(r);
    }
    bool feasible = true;
    const Eigen::VectorXd g = a * x + b;
    for (Eigen::Index i = 0; i < n && feasible; ++i) {
      switch (state[static_cast<std::size_t>(i)]) {
        case 0: feasible = g(i) >= -tol; break;
        case 2: feasible = g(i) <= tol; break;
        default: feasible = x(i) >= lower(i) - tol && x(i) <= upper(i) + tol; break;
      }
    }
    if (!feasible) continue;
    const double value = 0.5 * x.dot(a * x) + b.dot(x);
    if (value < best_value) {
      best_value = value;
      best = x;
    }
  }
  return best;
}

Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

Eigen::VectorXcd monic_roots(const std::vector<double>& d) {
  const auto m = static_cast<Eigen::Index>(d.size());
  if (m == 0) return {};
  // Frobenius form with the coefficients in the first row.
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j) c(0, j) = -d[static_cast<std::size_t>(m - 1 - j)];
  for (Eigen::Index i = 1; i < m; ++i) c(i, i - 1) = 1.0;
  return Eigen::EigenSolver<Eigen::MatrixXd>(c, false).eigenvalues();
}

}  // namespace imopt::reference
