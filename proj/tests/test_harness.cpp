#include <cmath>

#include <gtest/gtest.h>

#include "imopt/harness.hpp"

namespace imopt {
namespace {

ExperimentConfig short_experiment(Step horizon) {
  ExperimentConfig c = default_experiment();
  c.scenario.horizon = horizon;
  return c;
}

TEST(Harness, DefaultExperimentHasThreeAlgorithms) {
  const auto c = default_experiment();
  ASSERT_EQ(c.algorithms.size(), 3u);
  EXPECT_EQ(c.algorithms[0].kind, AlgorithmKind::Pogd);
  EXPECT_EQ(c.algorithms[1].kind, AlgorithmKind::Pcbw);
  EXPECT_EQ(c.algorithms[2].kind, AlgorithmKind::Psimbo);
  EXPECT_NO_THROW(c.validate());
}

TEST(Harness, SingleStepHorizon) {
  const Trace t = run_experiment(short_experiment(1));
  EXPECT_EQ(t.steps(), 1);
  for (const auto& a : t.algorithms) {
    ASSERT_EQ(a.x.size(), 1u);
    EXPECT_EQ(a.cumulative[0], a.error[0]);
  }
}

TEST(Harness, TraceInvariants) {
  const Trace t = run_experiment(short_experiment(300));
  EXPECT_EQ(t.n, 6);
  ASSERT_EQ(t.x_star.size(), 300u);
  const std::uint64_t checksum = t.algorithms.front().b_checksum;
  for (const auto& a : t.algorithms) {
    EXPECT_EQ(a.b_checksum, checksum);
    EXPECT_EQ(a.feasibility_violations, 0u);
    double sum = 0.0;
    for (std::size_t k = 0; k < a.error.size(); ++k) {
      EXPECT_DOUBLE_EQ(a.error[k], (a.x[k] - t.x_star[k]).norm());
      sum += a.error[k];
      EXPECT_DOUBLE_EQ(a.cumulative[k], sum);
    }
  }
  EXPECT_EQ(t.algorithm("pogd").phase.front(), "none");
  EXPECT_EQ(t.algorithm("psimbo").phase.front(), "warmup");
  EXPECT_EQ(t.algorithm("psimbo").d_hat.size(), 300u);
  EXPECT_THROW(t.algorithm("nope"), std::out_of_range);
}

TEST(Harness, InitialIterateIsProjectedOrigin) {
  const Trace t = run_experiment(short_experiment(2));
  Eigen::VectorXd want(6);
  want << 0.0, 0.0, 3.0, 7.0, 0.0, 3.0;
  for (const auto& a : t.algorithms) EXPECT_EQ(a.x[0], want);
}

TEST(Harness, BestWindowMedianByHand) {
  const std::vector<double> v{5.0, 1.0, 4.0, 2.0, 8.0, 0.5, 0.25, 9.0};
  // Windows of 3: medians 4, 2, 4, 2, 0.5, 0.5.
  const auto [m3, s3] = best_window_median(v, 3);
  EXPECT_EQ(m3, 0.5);
  EXPECT_EQ(s3, 4);
  // Windows of 2 average the middle pair: 3, 2.5, 3, 5, 4.25, 0.375, 4.625.
  const auto [m2, s2] = best_window_median(v, 2);
  EXPECT_DOUBLE_EQ(m2, 0.375);
  EXPECT_EQ(s2, 5);
  const auto [all, s_all] = best_window_median(v, 8);
  EXPECT_DOUBLE_EQ(all, 3.0);
  EXPECT_EQ(s_all, 0);
}

TEST(Harness, SummaryDerivesPhaseSwitchesFromTheColumn) {
  Trace t;
  t.n = 1;
  t.seed = 4;
  AlgorithmTrace a;
  a.name = "s";
  a.kind = "psimbo";
  const std::vector<std::string> phases{"warmup", "warmup", "structured", "structured", "fallback", "structured"};
  for (std::size_t k = 0; k < phases.size(); ++k) {
    t.x_star.push_back(Eigen::VectorXd::Zero(1));
    a.x.push_back(Eigen::VectorXd::Constant(1, 1.0));
    a.error.push_back(1.0);
    a.cumulative.push_back(static_cast<double>(k + 1));
    a.phase.push_back(phases[k]);
  }
  t.algorithms.push_back(a);
  const Summary s = summarize(t, 500);
  const auto& as = s.algorithm("s");
  EXPECT_EQ(as.window, 6u);
  ASSERT_TRUE(as.first_structured.has_value());
  EXPECT_EQ(*as.first_structured, 2);
  ASSERT_EQ(as.phase_switches.size(), 3u);
  EXPECT_EQ(as.phase_switches[1].step, 4);
  EXPECT_EQ(as.phase_switches[1].phase, "fallback");
  EXPECT_DOUBLE_EQ(as.final_cumulative_error, 6.0);
}

TEST(Harness, ValidationRejectsBadConfigurations) {
  ExperimentConfig c = default_experiment();
  c.algorithms[1].name = "pogd";
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = default_experiment();
  c.algorithms[1].model.reset();
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = default_experiment();
  c.algorithms.clear();
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = default_experiment();
  c.scenario.horizon = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = default_experiment();
  c.algorithms[0].name = "a,b";
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Harness, OracleFailureReportsStep) {
  ExperimentConfig c = short_experiment(20);
  c.oracle.max_iterations = 1;
  try {
    run_experiment(c);
    FAIL() << "expected ExperimentError";
  } catch (const ExperimentError& e) {
    EXPECT_GE(e.step(), 0);
    EXPECT_NE(std::string(e.what()).find("step"), std::string::npos);
  }
}

TEST(Harness, ModelSpecBuildsNamedModels) {
  const auto build = [](std::string kind, double omega, std::vector<double> d = {}) {
    return ModelSpec{std::move(kind), omega, std::move(d)}.build();
  };
  EXPECT_EQ(build("step", 0.0).denominator(), std::vector<double>{-1.0});
  EXPECT_EQ(build("ramp", 0.0).order(), 2u);
  EXPECT_EQ(build("sin_squared", 10.0).order(), 3u);
  const std::vector<double> custom{0.25, -1.0};
  EXPECT_EQ(build("custom", 0.0, custom).denominator(), custom);
  EXPECT_THROW(build("wavelet", 0.0), std::invalid_argument);
}

TEST(Harness, AlgorithmKindNames) {
  for (auto k : {AlgorithmKind::Pogd, AlgorithmKind::Cb, AlgorithmKind::Pcb, AlgorithmKind::Pcbw, AlgorithmKind::Psimbo})
    EXPECT_EQ(algorithm_kind_from_string(to_string(k)), k);
  EXPECT_THROW(algorithm_kind_from_string("adam"), std::invalid_argument);
}

TEST(Harness, AdaptiveSolverBeatsGradientDescentOnBenchmark) {
  const Trace t = run_experiment(short_experiment(8000));
  EXPECT_LT(t.algorithm("psimbo").cumulative.back(), t.algorithm("pogd").cumulative.back());
  EXPECT_TRUE(summarize(t).algorithm("psimbo").first_structured.has_value());
}

}  // namespace
}  // namespace imopt
