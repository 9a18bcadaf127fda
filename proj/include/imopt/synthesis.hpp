#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "imopt/internal_model.hpp"
#include "imopt/problem.hpp"

namespace imopt {

class SynthesisFailed : public std::runtime_error {
 public:
  explicit SynthesisFailed(const std::string& what) : std::runtime_error(what) {}
};

/// Output row K = gain_scale * k_row of the control-based solver, together
/// with the certificate it was accepted under.
struct ControllerGains {
  std::vector<double> k_row;
  double nominal_lambda = 1.0;
  double gain_scale = 1.0;
  double certified_radius = 0.0;

  /// gain_scale * k_row, the row actually applied to the controller state.
  Eigen::RowVectorXd effective_row() const;
};

struct SynthesisOptions {
  int grid_points = 512;      // Chebyshev nodes; both endpoints are added
  int scale_candidates = 40;  // geometric grid 1, r, r^2, ...
  double scale_ratio = 0.9;
  double stability_margin = 1e-3;
};

/// Coefficients (ascending, leading 1 last) of
/// z^m + sum_i (d_i - lambda * gain_scale * c_i) z^i, the characteristic
/// polynomial of F + lambda G K on one eigendirection of A.
std::vector<double> closed_loop_poly(const InternalModel& model, const ControllerGains& gains,
                                     double lambda);

/// c_i = d_i / lambda_nominal: all closed-loop poles at the origin when the
/// curvature equals lambda_nominal.
ControllerGains deadbeat_gains(const InternalModel& model, double lambda_nominal);

/// Largest closed-loop root modulus over `grid_points` Chebyshev nodes in
/// [range.low, range.high] plus both endpoints.
double verify_stability(const InternalModel& model, const ControllerGains& gains,
                        SpectralBounds range, int grid_points);

/// Deadbeat at the spectral midpoint, then the gain scale from the geometric
/// grid with the smallest certified radius. Throws SynthesisFailed if no scale
/// certifies a radius below 1 - stability_margin.
ControllerGains synthesize(const InternalModel& model, SpectralBounds range,
                           const SynthesisOptions& options = {});

/// Nodes used by verify_stability, exposed for tests.
std::vector<double> verification_grid(SpectralBounds range, int grid_points);

}  // namespace imopt
