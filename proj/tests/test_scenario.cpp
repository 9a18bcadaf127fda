#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "imopt/scenario.hpp"

namespace imopt {
namespace {

TEST(Scenario, HessianSpectrumWithinDeclaredBounds) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Scenario s = make_microgrid_scenario(ScenarioConfig{}, seed);
    const auto spec = spectrum_of(hessian_of(s));
    EXPECT_GE(spec.low, 1.0 - 1e-9);
    EXPECT_LE(spec.high, 6.0 + 1e-9);
  }
}

TEST(Scenario, GridMatricesHaveRequestedEigenvalues) {
  const Scenario s = make_microgrid_scenario(ScenarioConfig{}, 11);
  const Eigen::VectorXd jtj = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s.j_matrix.transpose() * s.j_matrix)
                                  .eigenvalues();
  int nonzero = 0;
  for (Eigen::Index i = 0; i < jtj.size(); ++i) {
    if (jtj(i) > 1e-9) {
      ++nonzero;
      EXPECT_GE(jtj(i), 1.0 - 1e-9);
      EXPECT_LE(jtj(i), 5.0 + 1e-9);
    }
  }
  EXPECT_EQ(nonzero, 2);
  const Eigen::VectorXd u1 = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s.u1_matrix).eigenvalues();
  EXPECT_GT(u1.minCoeff(), 0.0);
  EXPECT_LE(u1.maxCoeff(), 1.0 + 1e-12);
}

TEST(Scenario, SameSeedSameScenario) {
  const Scenario a = make_microgrid_scenario(ScenarioConfig{}, 5);
  const Scenario b = make_microgrid_scenario(ScenarioConfig{}, 5);
  const Scenario c = make_microgrid_scenario(ScenarioConfig{}, 6);
  EXPECT_EQ(a.j_matrix, b.j_matrix);
  EXPECT_EQ(a.u2_second, b.u2_second);
  EXPECT_NE(a.j_matrix, c.j_matrix);
}

TEST(Scenario, PreferencesSwitchByQuarter) {
  const Scenario s = make_microgrid_scenario(ScenarioConfig{}, 1);
  EXPECT_TRUE(s.first_preferences_active(0));
  EXPECT_TRUE(s.first_preferences_active(1999));
  EXPECT_FALSE(s.first_preferences_active(2000));
  EXPECT_FALSE(s.first_preferences_active(3999));
  EXPECT_TRUE(s.first_preferences_active(4000));
  EXPECT_FALSE(s.first_preferences_active(6000));
  EXPECT_EQ(s.u2(100), s.u2_first);
  EXPECT_EQ(s.u2(2500), s.u2_second);

  ScenarioConfig fixed;
  fixed.preference_switching = false;
  const Scenario f = make_microgrid_scenario(fixed, 1);
  EXPECT_TRUE(f.first_preferences_active(2500));
}

TEST(Scenario, LinearTermIsGradientAtOrigin) {
  const Scenario s = make_microgrid_scenario(ScenarioConfig{}, 2);
  const QuadraticProblem p = make_problem(s);
  for (Step k : {0, 17, 2000, 7999}) {
    const Eigen::VectorXd b = linear_term(s, k);
    EXPECT_TRUE(b.isApprox(p.gradient(k, Eigen::VectorXd::Zero(6)), 1e-14));
    const Eigen::VectorXd expected = s.config.beta * s.j_matrix.transpose() *
                                         (s.h_matrix * s.load(k) - s.reference(k)) +
                                     s.u2(k);
    EXPECT_TRUE(b.isApprox(expected, 1e-14));
  }
  EXPECT_THROW(linear_term(s, 8000), std::out_of_range);
}

TEST(Scenario, LoadIsSlowSinusoid) {
  const Scenario s = make_microgrid_scenario(ScenarioConfig{}, 2);
  EXPECT_DOUBLE_EQ(s.load(100)(0), std::sin(0.5));
  EXPECT_DOUBLE_EQ(s.load(100)(1), std::sin(0.5));
}

TEST(Scenario, BoxMatchesDefaults) {
  const Scenario s = make_microgrid_scenario(ScenarioConfig{}, 2);
  const BoxSet box = s.box(10);
  EXPECT_EQ(box.lower()(4), 0.0);
  EXPECT_EQ(box.upper()(5), 32.0);
}

TEST(Scenario, InvalidConfigurationsThrow) {
  ScenarioConfig c;
  c.reference_period = 1;
  EXPECT_THROW(make_microgrid_scenario(c, 1), ScenarioError);
  c = ScenarioConfig{};
  c.box_lower[0] = 20.0;
  EXPECT_THROW(make_microgrid_scenario(c, 1), std::invalid_argument);
}

}  // namespace
}  // namespace imopt
