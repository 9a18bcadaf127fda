#include "imopt/scenario.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <random>

#include <json.hpp>

namespace imopt {

namespace {

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the signs
// of R's diagonal folded into Q.
Eigen::MatrixXd random_orthogonal(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

void validate(const ScenarioConfig& c) {
  if (c.n <= 0 || c.y_dim <= 0 || c.w_dim <= 0) throw ScenarioError("dimensions must be positive");
  if (c.y_dim > c.n) throw ScenarioError("y_dim must not exceed n");
  if (c.horizon <= 0) throw ScenarioError("horizon must be positive");
  if (!(c.beta >= 0.0)) throw ScenarioError("beta must be non-negative");
  if (c.reference_period < 2) throw ScenarioError("reference period must be at least 2");
  if (!c.reference_offset.empty() && static_cast<int>(c.reference_offset.size()) != c.y_dim) {
    throw ScenarioError("reference offset must have y_dim entries");
  }
  if (!(0.0 < c.grid_eigen_min && c.grid_eigen_min <= c.grid_eigen_max)) {
    throw ScenarioError("grid eigenvalue range must satisfy 0 < min <= max");
  }
  if (!(c.u1_eigen_max > 0.0)) throw ScenarioError("u1 eigenvalue bound must be positive");
  if (static_cast<int>(c.box_lower.size()) != c.n || static_cast<int>(c.box_upper.size()) != c.n) {
    throw ScenarioError("box bounds must have n entries");
  }
  if (c.max_retries < 1) throw ScenarioError("retry budget must be positive");
}

}  // namespace

bool Scenario::first_preferences_active(Step k) const {
  if (!config.preference_switching) return true;
  const Step quarter = (4 * k) / config.horizon;
  return quarter == 0 || quarter == 2;
}

Eigen::VectorXd Scenario::load(Step k) const {
  const double v = config.load_amplitude * std::sin(config.load_frequency * static_cast<double>(k));
  return Eigen::VectorXd::Constant(config.w_dim, v);
}

Eigen::VectorXd Scenario::reference(Step k) const {
  const Eigen::VectorXd offset = config.reference_offset.empty()
                                     ? Eigen::VectorXd::Zero(config.y_dim)
                                     : to_vector(config.reference_offset);
  return triangular_reference(k, config.reference_period, config.reference_amplitude, offset);
}

Eigen::VectorXd Scenario::u2(Step k) const {
  return first_preferences_active(k) ? u2_first : u2_second;
}

double Scenario::u3(Step k) const { return first_preferences_active(k) ? u3_first : u3_second; }

BoxSet Scenario::box(Step) const { return BoxSet(box_lower, box_upper); }

double Scenario::cost(Step k, const Eigen::VectorXd& x) const {
  const Eigen::VectorXd r = j_matrix * x + h_matrix * load(k) - reference(k);
  return 0.5 * config.beta * r.squaredNorm() + 0.5 * x.dot(u1_matrix * x) + x.dot(u2(k)) + u3(k);
}

Scenario make_microgrid_scenario(const ScenarioConfig& config, std::uint64_t seed) {
  validate(config);
  const Eigen::Index n = config.n;
  const Eigen::Index ny = config.y_dim;
  const Eigen::Index nw = config.w_dim;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto uniform_in = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  for (int attempt = 0; attempt < config.max_retries; ++attempt) {
    Scenario s;
    s.config = config;
    s.seed = seed;

    // J = R diag(sqrt(sigma)) V_y' gives J'J = V_y diag(sigma) V_y'.
    const Eigen::MatrixXd v = random_orthogonal(n, rng);
    Eigen::VectorXd sigma(ny);
    for (Eigen::Index i = 0; i < ny; ++i) sigma(i) = uniform_in(config.grid_eigen_min, config.grid_eigen_max);
    const Eigen::MatrixXd rot = random_orthogonal(ny, rng);
    s.j_matrix = rot * sigma.cwiseSqrt().asDiagonal() * v.leftCols(ny).transpose();

    const Eigen::MatrixXd qh = random_orthogonal(nw, rng);
    Eigen::VectorXd h_eig(nw);
    for (Eigen::Index i = 0; i < nw; ++i) h_eig(i) = uniform_in(config.grid_eigen_min, config.grid_eigen_max);
    if (ny == nw) {
      s.h_matrix = qh * h_eig.asDiagonal() * qh.transpose();
    } else {
      // Rectangular H: keep the drawn values as singular values.
      const Eigen::MatrixXd qy = random_orthogonal(ny, rng);
      Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(ny, nw);
      for (Eigen::Index i = 0; i < std::min(ny, nw); ++i) diag(i, i) = h_eig(i);
      s.h_matrix = qy * diag * qh.transpose();
    }

    // U1 is diagonal in J's right singular basis: random (0, max] on J's row
    // space, max on its null space, so the Hessian never drops below
    // min(grid_eigen_min, u1_eigen_max).
    Eigen::VectorXd u1_eig = Eigen::VectorXd::Constant(n, config.u1_eigen_max);
    for (Eigen::Index i = 0; i < ny; ++i) u1_eig(i) = config.u1_eigen_max * (1.0 - unit(rng));
    s.u1_matrix = v * u1_eig.asDiagonal() * v.transpose();
    s.u1_matrix = 0.5 * (s.u1_matrix + s.u1_matrix.transpose()).eval();

    s.u2_first.resize(n);
    s.u2_second.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) s.u2_first(i) = normal(rng);
    for (Eigen::Index i = 0; i < n; ++i) s.u2_second(i) = normal(rng);
    s.u3_first = normal(rng);
    s.u3_second = normal(rng);

    s.box_lower = to_vector(config.box_lower);
    s.box_upper = to_vector(config.box_upper);
    (void)BoxSet(s.box_lower, s.box_upper);  // validates non-emptiness

    const auto spec = spectrum_of(hessian_of(s));
    const double slack = 1e-10 * config.spectral_bounds.high;
    if (spec.low >= config.spectral_bounds.low - slack &&
        spec.high <= config.spectral_bounds.high + slack) {
      return s;
    }
  }
  throw ScenarioError("could not draw a scenario inside the declared spectral bounds within " +
                      std::to_string(config.max_retries) + " attempts");
}

Eigen::VectorXd linear_term(const Scenario& scenario, Step k) {
  if (k < 0 || k >= scenario.horizon()) {
    throw std::out_of_range("step " + std::to_string(k) + " is outside the scenario horizon");
  }
  return scenario.config.beta * scenario.j_matrix.transpose() *
             (scenario.h_matrix * scenario.load(k) - scenario.reference(k)) +
         scenario.u2(k);
}

Eigen::MatrixXd hessian_of(const Scenario& scenario) {
  Eigen::MatrixXd a = scenario.config.beta * scenario.j_matrix.transpose() * scenario.j_matrix +
                      scenario.u1_matrix;
  return 0.5 * (a + a.transpose());
}

QuadraticProblem make_problem(const Scenario& scenario) {
  auto shared = std::make_shared<const Scenario>(scenario);
  return QuadraticProblem(
      hessian_of(*shared), [shared](Step k) { return linear_term(*shared, k); },
      [shared](Step k) { return shared->box(k); }, shared->config.spectral_bounds,
      shared->horizon());
}

namespace {

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json vector_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

void export_scenario_json(const Scenario& s, const std::string& path, bool include_schedules) {
  nlohmann::json j;
  const auto& c = s.config;
  j["format"] = "imopt-scenario";
  j["version"] = 1;
  j["seed"] = s.seed;
  j["config"] = {
      {"n", c.n},
      {"y_dim", c.y_dim},
      {"w_dim", c.w_dim},
      {"horizon", c.horizon},
      {"beta", c.beta},
      {"load_frequency", c.load_frequency},
      {"load_amplitude", c.load_amplitude},
      {"reference_period", c.reference_period},
      {"reference_amplitude", c.reference_amplitude},
      {"reference_offset", c.reference_offset},
      {"grid_eigen_min", c.grid_eigen_min},
      {"grid_eigen_max", c.grid_eigen_max},
      {"u1_eigen_max", c.u1_eigen_max},
      {"preference_switching", c.preference_switching},
      {"box_lower", c.box_lower},
      {"box_upper", c.box_upper},
      {"spectral_bounds", {c.spectral_bounds.low, c.spectral_bounds.high}},
  };
  j["j_matrix"] = matrix_json(s.j_matrix);
  j["h_matrix"] = matrix_json(s.h_matrix);
  j["u1_matrix"] = matrix_json(s.u1_matrix);
  j["hessian"] = matrix_json(hessian_of(s));
  j["u2_first"] = vector_json(s.u2_first);
  j["u2_second"] = vector_json(s.u2_second);
  j["u3_first"] = s.u3_first;
  j["u3_second"] = s.u3_second;
  if (include_schedules) {
    auto rows = nlohmann::json::array();
    for (Step k = 0; k < s.horizon(); ++k) {
      rows.push_back({{"k", k},
                      {"load", vector_json(s.load(k))},
                      {"reference", vector_json(s.reference(k))},
                      {"u2", vector_json(s.u2(k))},
                      {"u3", s.u3(k)},
                      {"b", vector_json(linear_term(s, k))}});
    }
    j["schedules"] = std::move(rows);
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace imopt
