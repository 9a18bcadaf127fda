#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "imopt/internal_model.hpp"
#include "imopt/rls.hpp"
#include "reference.hpp"

namespace imopt {
namespace {

// Sequence satisfying the recurrence of the model, started from random values.
std::vector<Eigen::VectorXd> generate(const InternalModel& model, Eigen::Index n, int length, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const auto& d = model.denominator();
  const std::size_t m = d.size();
  std::vector<Eigen::VectorXd> xs;
  for (std::size_t t = 0; t < m; ++t) {
    Eigen::VectorXd x(n);
    for (Eigen::Index j = 0; j < n; ++j) x(j) = normal(rng);
    xs.push_back(x);
  }
  while (static_cast<int>(xs.size()) < length) {
    Eigen::VectorXd next = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < m; ++i) next -= d[i] * xs[xs.size() - m + i];
    xs.push_back(next);
  }
  return xs;
}

TEST(Rls, RegressorsAreOrderedByTimeThenCoordinate) {
  std::vector<Eigen::VectorXd> h{Eigen::Vector2d(1, 10), Eigen::Vector2d(2, 20), Eigen::Vector2d(3, 30)};
  const auto regs = build_regressors(h, 2);
  ASSERT_EQ(regs.size(), 2u);
  EXPECT_EQ(regs[0].phi, Eigen::Vector2d(1, 2));
  EXPECT_EQ(regs[0].target, -3.0);
  EXPECT_EQ(regs[1].phi, Eigen::Vector2d(10, 20));
  EXPECT_EQ(regs[1].target, -30.0);
  EXPECT_THROW(build_regressors(std::span(h).first(2), 2), InsufficientHistory);
}

TEST(Rls, IdentifiesSinSquaredFromNoiselessData) {
  const auto model = model_sin_squared(10.0);
  const auto xs = generate(model, 1, 260, 42);
  RlsState state(3, RlsOptions{0.99, 1e8, 4096});
  int updates = 0;
  for (const auto& r : build_regressors(xs, 3)) {
    if (updates++ == 200) break;
    rls_update(state, r);
  }
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(state.d_hat()(static_cast<Eigen::Index>(i)), model.denominator()[i], 1e-6);
}

TEST(Rls, MatchesBatchLeastSquares) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 1 + trial % 4, n = 60;
    Eigen::MatrixXd phi(n, m);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < phi.size(); ++i) phi.data()[i] = normal(rng);
    for (int i = 0; i < n; ++i) y(i) = normal(rng);
    for (double alpha : {1.0, 0.97}) {
      RlsState s(static_cast<std::size_t>(m), RlsOptions{alpha, 1e8, 4096});
      for (int i = 0; i < n; ++i) rls_update(s, Regressor{phi.row(i).transpose(), y(i)});
      EXPECT_LT((s.d_hat() - reference::weighted_least_squares(phi, y, alpha)).lpNorm<Eigen::Infinity>(), 1e-7);
    }
  }
}

TEST(Rls, CovarianceStaysSymmetricPositiveDefinite) {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> normal;
  RlsState s(3, RlsOptions{0.95, 1e4, 64});
  for (int i = 0; i < 2000; ++i) {
    const Eigen::Vector3d phi(normal(rng), normal(rng), normal(rng));
    rls_update(s, Regressor{phi, normal(rng)});
    ASSERT_LT((s.p_matrix() - s.p_matrix().transpose()).norm(), 1e-12);
    ASSERT_EQ(Eigen::LLT<Eigen::MatrixXd>(s.p_matrix()).info(), Eigen::Success);
  }
  EXPECT_EQ(s.error_history().size(), 64u);
  EXPECT_EQ(s.sample_count(), 2000u);
}

TEST(Rls, NonFiniteDataResetsCovariance) {
  RlsState s(2);
  const auto out = rls_update(s, Regressor{Eigen::Vector2d(std::numeric_limits<double>::infinity(), 1.0), 1.0});
  EXPECT_TRUE(out.covariance_reset);
  EXPECT_TRUE(s.d_hat().allFinite());
  EXPECT_EQ(s.covariance_resets(), 1u);
  EXPECT_EQ(s.p_matrix(), 1e4 * Eigen::Matrix2d::Identity());
}

TEST(Rls, GroupUpdateRecordsOneRmsEntry) {
  RlsState s(1, RlsOptions{1.0, 1e8, 16});
  const std::vector<Regressor> group{{Eigen::VectorXd::Constant(1, 1.0), 2.0}, {Eigen::VectorXd::Constant(1, 1.0), 4.0}};
  const auto out = rls_update_group(s, group);
  ASSERT_EQ(s.error_history().size(), 1u);
  // Estimate ~3, residuals ~ -1 and 1.
  EXPECT_NEAR(s.d_hat()(0), 3.0, 1e-6);
  EXPECT_NEAR(out.a_posteriori_error, 1.0, 1e-6);
}

TEST(Rls, OptionsAreValidated) {
  EXPECT_THROW(RlsState(0), std::invalid_argument);
  EXPECT_THROW(RlsState(2, RlsOptions{0.0, 1.0, 10}), std::invalid_argument);
  EXPECT_THROW(RlsState(2, RlsOptions{1.01, 1.0, 10}), std::invalid_argument);
  EXPECT_THROW(RlsState(2, RlsOptions{0.9, -1.0, 10}), std::invalid_argument);
}

TEST(Settling, ConstantErrorsSettle) {
  std::deque<double> e(100, 0.3);
  EXPECT_TRUE(is_settled(e, 100, 0.05));
  EXPECT_DOUBLE_EQ(windowed_variation(e, 100), 0.0);
}

TEST(Settling, ShortHistoryNeverSettles) {
  std::deque<double> e(99, 0.3);
  EXPECT_FALSE(is_settled(e, 100, 0.05));
  EXPECT_THROW(is_settled(e, 1, 0.05), std::invalid_argument);
}

TEST(Settling, VariationUsesOnlyTheLastWindow) {
  std::deque<double> e{100.0, 1.0, 1.1, 0.9, 1.0};
  EXPECT_NEAR(windowed_variation(e, 4), 0.2 / 1.0, 1e-12);
  EXPECT_FALSE(is_settled(e, 5, 0.5));
  EXPECT_TRUE(is_settled(e, 4, 0.5));
}

TEST(Settling, TinyErrorsUseTheFloor) {
  std::deque<double> e(10, 0.0);
  e.back() = 1e-14;
  EXPECT_NEAR(windowed_variation(e, 10), 1e-2, 1e-12);
}

}  // namespace
}  // namespace imopt
