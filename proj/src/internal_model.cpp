#include "imopt/internal_model.hpp"

#include <cmath>
#include <numbers>

#include "imopt/polynomial.hpp"

namespace imopt {

InternalModel::InternalModel(std::vector<double> denominator) : d_(std::move(denominator)) {
  if (d_.empty()) throw InvalidModel("internal model order must be at least 1");
  roots_ = monic_roots(d_);
  for (const auto& r : roots_) {
    if (std::abs(r) > 1.0 + kPoleTolerance) {
      throw InvalidModel("internal model has an unstable pole of modulus " +
                         std::to_string(std::abs(r)));
    }
  }
}

std::vector<double> InternalModel::monic_coefficients() const {
  std::vector<double> p = d_;
  p.push_back(1.0);
  return p;
}

CompanionRealization companion_realization(const InternalModel& model) {
  const auto m = static_cast<Eigen::Index>(model.order());
  CompanionRealization out;
  out.f_matrix = companion_matrix(model.denominator());
  out.g_vector = Eigen::VectorXd::Zero(m);
  out.g_vector(m - 1) = 1.0;
  return out;
}

InternalModel model_step() { return InternalModel({-1.0}); }

InternalModel model_ramp() { return InternalModel({1.0, -2.0}); }

InternalModel model_sinusoid(double omega) {
  if (!(omega > 0.0 && omega < std::numbers::pi)) {
    throw InvalidModel("sinusoid frequency must lie in (0, pi)");
  }
  return InternalModel({1.0, -2.0 * std::cos(omega)});
}

InternalModel model_sin_squared(double omega0) {
  // 2*omega0 on a multiple of pi collapses the quadratic onto z = +-1.
  if (!std::isfinite(omega0) || std::abs(std::sin(2.0 * omega0)) <= 1e-9) {
    throw InvalidModel("degenerate sin^2 frequency: 2*omega0 is a multiple of pi");
  }
  const double c = std::cos(2.0 * omega0);
  const std::vector<double> linear{-1.0, 1.0};
  const std::vector<double> quadratic{1.0, -2.0 * c, 1.0};
  auto p = poly_multiply(linear, quadratic);
  p.pop_back();
  return InternalModel(std::move(p));
}

InternalModel combine_models(const InternalModel& a, const InternalModel& b,
                             std::size_t max_order) {
  std::vector<bool> used(a.order(), false);
  std::vector<std::complex<double>> extra;
  for (const auto& rb : b.roots()) {
    bool matched = false;
    for (std::size_t i = 0; i < a.roots().size(); ++i) {
      if (!used[i] && std::abs(a.roots()[i] - rb) <= kRootMatchTolerance) {
        used[i] = true;
        matched = true;
        break;
      }
    }
    if (!matched) extra.push_back(rb);
  }
  if (a.order() + extra.size() > max_order) {
    throw InvalidModel("combined model order " + std::to_string(a.order() + extra.size()) +
                       " exceeds cap " + std::to_string(max_order));
  }
  if (extra.empty()) return a;
  auto p = poly_multiply(a.monic_coefficients(), poly_from_roots(extra));
  p.pop_back();
  return InternalModel(std::move(p));
}

InternalModel stabilized_model(const std::vector<double>& denominator) {
  auto roots = monic_roots(denominator);
  bool changed = false;
  for (auto& r : roots) {
    const double mod = std::abs(r);
    if (mod > 1.0) {
      r /= mod;
      changed = true;
    }
  }
  if (!changed) return InternalModel(denominator);
  auto p = poly_from_roots(roots);
  p.pop_back();
  return InternalModel(std::move(p));
}

std::vector<PoleInfo> classify_poles(const std::vector<double>& denominator) {
  std::vector<PoleInfo> out;
  for (const auto& r : monic_roots(denominator)) {
    PoleInfo info;
    info.root = r;
    info.modulus = std::abs(r);
    if (std::abs(info.modulus - 1.0) <= kPoleTolerance) {
      info.pole_class = PoleClass::MarginallyStable;
    } else if (info.modulus < 1.0) {
      info.pole_class = PoleClass::AsymptoticallyStable;
    } else {
      info.pole_class = PoleClass::Unstable;
    }
    out.push_back(info);
  }
  return out;
}

std::vector<PoleInfo> classify_poles(const InternalModel& model) {
  return classify_poles(model.denominator());
}

const char* to_string(PoleClass c) {
  switch (c) {
    case PoleClass::AsymptoticallyStable: return "asymptotically_stable";
    case PoleClass::MarginallyStable: return "marginally_stable";
    case PoleClass::Unstable: return "unstable";
  }
  return "unknown";
}

}  // namespace imopt
