#include "imopt/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "imopt/polynomial.hpp"

namespace imopt {

Eigen::RowVectorXd ControllerGains::effective_row() const {
  Eigen::RowVectorXd row(static_cast<Eigen::Index>(k_row.size()));
  for (std::size_t i = 0; i < k_row.size(); ++i) row(static_cast<Eigen::Index>(i)) = gain_scale * k_row[i];
  return row;
}

std::vector<double> closed_loop_poly(const InternalModel& model, const ControllerGains& gains,
                                     double lambda) {
  const auto& d = model.denominator();
  if (gains.k_row.size() != d.size()) throw std::invalid_argument("gain row length differs from model order");
  std::vector<double> p(d.size() + 1);
  for (std::size_t i = 0; i < d.size(); ++i) p[i] = d[i] - lambda * gains.gain_scale * gains.k_row[i];
  p.back() = 1.0;
  return p;
}

ControllerGains deadbeat_gains(const InternalModel& model, double lambda_nominal) {
  if (!(lambda_nominal > 0.0)) throw std::invalid_argument("nominal curvature must be positive");
  ControllerGains g;
  g.nominal_lambda = lambda_nominal;
  g.gain_scale = 1.0;
  g.k_row.reserve(model.order());
  for (double di : model.denominator()) g.k_row.push_back(di / lambda_nominal);
  g.certified_radius = 0.0;
  return g;
}

std::vector<double> verification_grid(SpectralBounds range, int grid_points) {
  if (grid_points < 2) throw std::invalid_argument("verification grid needs at least 2 points");
  if (!(range.low > 0.0) || range.high < range.low) throw std::invalid_argument("invalid curvature range");
  if (range.low == range.high) return {range.low};
  std::vector<double> nodes{range.low, range.high};
  const double mid = 0.5 * (range.low + range.high);
  const double half = 0.5 * (range.high - range.low);
  for (int i = 0; i < grid_points; ++i) {
    const double theta = std::numbers::pi * (i + 0.5) / grid_points;
    nodes.push_back(mid + half * std::cos(theta));
  }
  return nodes;
}

double verify_stability(const InternalModel& model, const ControllerGains& gains,
                        SpectralBounds range, int grid_points) {
  double worst = 0.0;
  for (double lambda : verification_grid(range, grid_points)) {
    auto p = closed_loop_poly(model, gains, lambda);
    p.pop_back();
    worst = std::max(worst, spectral_radius_of_monic(p));
  }
  return worst;
}

ControllerGains synthesize(const InternalModel& model, SpectralBounds range,
                           const SynthesisOptions& options) {
  if (!(range.low > 0.0) || range.high < range.low) throw std::invalid_argument("invalid curvature range");
  if (options.scale_candidates < 1 || !(options.scale_ratio > 0.0 && options.scale_ratio < 1.0)) {
    throw std::invalid_argument("invalid gain scale grid");
  }
  ControllerGains best = deadbeat_gains(model, 0.5 * (range.low + range.high));
  best.certified_radius = std::numeric_limits<double>::infinity();

  ControllerGains candidate = best;
  double scale = 1.0;
  for (int i = 0; i < options.scale_candidates; ++i, scale *= options.scale_ratio) {
    candidate.gain_scale = scale;
    const double radius = verify_stability(model, candidate, range, options.grid_points);
    if (radius < best.certified_radius) {
      best.gain_scale = scale;
      best.certified_radius = radius;
    }
  }
  if (!(best.certified_radius < 1.0 - options.stability_margin)) {
    throw SynthesisFailed("no gain scale stabilizes the loop over [" + std::to_string(range.low) +
                          ", " + std::to_string(range.high) + "]; best radius " +
                          std::to_string(best.certified_radius));
  }
  return best;
}

}  // namespace imopt
