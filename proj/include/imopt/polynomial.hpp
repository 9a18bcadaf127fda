#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace imopt {

// Coefficient vectors are stored in ascending powers: p[i] multiplies z^i.

class RootFindingError : public std::runtime_error {
 public:
  explicit RootFindingError(const std::string& what) : std::runtime_error(what) {}
};

/// Product of two polynomials, accumulated with Neumaier compensated summation.
std::vector<double> poly_multiply(std::span<const double> a, std::span<const double> b);

/// Evaluates p(z) with Horner's rule.
std::complex<double> poly_eval(std::span<const double> p, std::complex<double> z);

/// Monic polynomial with the given roots. Complex roots must come in conjugate
/// pairs; the imaginary residue of the expanded coefficients is discarded.
std::vector<double> poly_from_roots(std::span<const std::complex<double>> roots);

/// Roots of the monic polynomial z^m + sum_i d[i] z^i, computed as eigenvalues
/// of the companion matrix, polished with Newton steps on the polynomial, and
/// with tight clusters (repeated roots) replaced by their centroid. Throws
/// RootFindingError if the eigensolver fails.
std::vector<std::complex<double>> monic_roots(std::span<const double> d);

/// Largest root modulus of z^m + sum_i d[i] z^i (0 for m = 0).
double spectral_radius_of_monic(std::span<const double> d);

/// Companion matrix with ones on the superdiagonal and last row -d.
Eigen::MatrixXd companion_matrix(std::span<const double> d);

}  // namespace imopt
