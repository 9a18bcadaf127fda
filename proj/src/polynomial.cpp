#include "imopt/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace imopt {

namespace {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// A k-fold root comes out of the eigensolver as k points spread by roughly
// eps^(1/k) around the true value; their centroid is accurate to near machine
// precision. Replace every tight cluster by its centroid.
void merge_root_clusters(std::vector<std::complex<double>>& roots) {
  constexpr double kClusterRadius = 1e-4;
  const std::size_t m = roots.size();
  std::vector<std::size_t> parent(m);
  for (std::size_t i = 0; i < m; ++i) parent[i] = i;
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double scale = std::max(1.0, std::abs(roots[i]));
      if (std::abs(roots[i] - roots[j]) <= kClusterRadius * scale) parent[find(i)] = find(j);
    }
  }
  std::vector<std::complex<double>> sum(m, 0.0);
  std::vector<int> count(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    sum[find(i)] += roots[i];
    ++count[find(i)];
  }
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t r = find(i);
    if (count[r] > 1) roots[i] = sum[r] / static_cast<double>(count[r]);
  }
}

}  // namespace

std::vector<double> poly_multiply(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t k = 0; k < out.size(); ++k) {
    CompensatedSum acc;
    const std::size_t i_lo = k >= b.size() - 1 ? k - (b.size() - 1) : 0;
    const std::size_t i_hi = std::min(k, a.size() - 1);
    for (std::size_t i = i_lo; i <= i_hi; ++i) acc.add(a[i] * b[k - i]);
    out[k] = acc.value();
  }
  return out;
}

std::complex<double> poly_eval(std::span<const double> p, std::complex<double> z) {
  std::complex<double> acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * z + *it;
  return acc;
}

std::vector<double> poly_from_roots(std::span<const std::complex<double>> roots) {
  std::vector<std::complex<double>> c{1.0};
  for (const auto& r : roots) {
    std::vector<std::complex<double>> next(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= r * c[i];
    }
    c = std::move(next);
  }
  std::vector<double> out(c.size());
  std::transform(c.begin(), c.end(), out.begin(), [](const auto& v) { return v.real(); });
  return out;
}

Eigen::MatrixXd companion_matrix(std::span<const double> d) {
  const auto m = static_cast<Eigen::Index>(d.size());
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i + 1 < m; ++i) f(i, i + 1) = 1.0;
  for (Eigen::Index j = 0; j < m; ++j) f(m - 1, j) = -d[static_cast<std::size_t>(j)];
  return f;
}

std::vector<std::complex<double>> monic_roots(std::span<const double> d) {
  if (d.empty()) return {};
  for (double v : d) {
    if (!std::isfinite(v)) throw RootFindingError("polynomial has non-finite coefficients");
  }
  const Eigen::MatrixXd f = companion_matrix(d);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(f, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw RootFindingError("companion eigensolver did not converge (order " +
                           std::to_string(d.size()) + ")");
  }

  std::vector<double> p(d.begin(), d.end());
  p.push_back(1.0);
  std::vector<double> dp(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) dp[i - 1] = static_cast<double>(i) * p[i];

  std::vector<std::complex<double>> roots(d.size());
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    std::complex<double> z = solver.eigenvalues()[i];
    // Newton polish; stop as soon as a step fails to reduce the residual
    // (repeated roots converge slowly and can wander otherwise).
    double res = std::abs(poly_eval(p, z));
    for (int it = 0; it < 8 && res > 0.0; ++it) {
      const auto deriv = poly_eval(dp, z);
      if (std::abs(deriv) == 0.0) break;
      const auto candidate = z - poly_eval(p, z) / deriv;
      const double cand_res = std::abs(poly_eval(p, candidate));
      if (!(cand_res < res)) break;
      z = candidate;
      res = cand_res;
    }
    roots[static_cast<std::size_t>(i)] = z;
  }
  merge_root_clusters(roots);
  return roots;
}

double spectral_radius_of_monic(std::span<const double> d) {
  double r = 0.0;
  for (const auto& z : monic_roots(d)) r = std::max(r, std::abs(z));
  return r;
}

}  // namespace imopt
