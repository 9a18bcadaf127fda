#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace imopt {

class InvalidModel : public std::invalid_argument {
 public:
  explicit InvalidModel(const std::string& what) : std::invalid_argument(what) {}
};

/// Poles may sit at most this far outside the unit circle.
inline constexpr double kPoleTolerance = 1e-9;
/// Roots closer than this are treated as the same root when merging models.
inline constexpr double kRootMatchTolerance = 1e-7;

/// Generator model of a signal class: the monic polynomial
/// B_D(z) = z^m + d[m-1] z^(m-1) + ... + d[0].
///
/// Only marginally or asymptotically stable models are representable; the
/// constructor rejects any root with modulus above 1 + kPoleTolerance.
class InternalModel {
 public:
  explicit InternalModel(std::vector<double> denominator);

  const std::vector<double>& denominator() const { return d_; }
  std::size_t order() const { return d_.size(); }

  /// Ascending coefficients including the leading 1.
  std::vector<double> monic_coefficients() const;

  /// Roots of B_D(z), computed at construction.
  const std::vector<std::complex<double>>& roots() const { return roots_; }

  bool operator==(const InternalModel& other) const { return d_ == other.d_; }

 private:
  std::vector<double> d_;
  std::vector<std::complex<double>> roots_;
};

/// The (F, G) pair in controllable companion form: F has ones on the
/// superdiagonal and last row -d, G = e_m.
struct CompanionRealization {
  Eigen::MatrixXd f_matrix;
  Eigen::VectorXd g_vector;
};

CompanionRealization companion_realization(const InternalModel& model);

InternalModel model_step();
InternalModel model_ramp();
/// z^2 - 2 cos(omega) z + 1; requires 0 < omega < pi.
InternalModel model_sinusoid(double omega);
/// Generator of sin^2(omega0 k): (z - 1)(z^2 - 2 cos(2 omega0) z + 1).
/// Rejects omega0 for which 2 omega0 is a multiple of pi (repeated roots).
InternalModel model_sin_squared(double omega0);

/// Least common multiple of the two denominators: shared roots (within
/// kRootMatchTolerance) are kept once. Throws InvalidModel if the result
/// would exceed max_order.
InternalModel combine_models(const InternalModel& a, const InternalModel& b,
                             std::size_t max_order = 12);

/// Builds a valid model from arbitrary monic coefficients by pulling every
/// root outside the unit disk radially back onto the unit circle. Used for
/// identified models, which may land marginally outside.
InternalModel stabilized_model(const std::vector<double>& denominator);

enum class PoleClass { AsymptoticallyStable, MarginallyStable, Unstable };

struct PoleInfo {
  std::complex<double> root;
  double modulus = 0.0;
  PoleClass pole_class = PoleClass::AsymptoticallyStable;
};

/// Classifies each root of d (monic, ascending, leading 1 implied) by modulus:
/// within 1e-9 of the unit circle is marginal. Accepts coefficients that do not
/// form a valid InternalModel so unstable candidates can be diagnosed.
std::vector<PoleInfo> classify_poles(const std::vector<double>& denominator);
std::vector<PoleInfo> classify_poles(const InternalModel& model);

const char* to_string(PoleClass c);

}  // namespace imopt
