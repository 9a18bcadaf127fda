#include <gtest/gtest.h>

#include "imopt/problem.hpp"

namespace imopt {
namespace {

QuadraticProblem diagonal_problem(std::optional<Step> horizon = std::nullopt) {
  Eigen::MatrixXd a = Eigen::Vector2d(1.0, 4.0).asDiagonal();
  return QuadraticProblem(
      a, [](Step k) { return Eigen::VectorXd::Constant(2, static_cast<double>(k)); },
      [](Step) { return BoxSet::symmetric(2, 5.0); }, SpectralBounds{1.0, 4.0}, horizon);
}

TEST(BoxSet, RejectsEmptyAndMismatchedBoxes) {
  EXPECT_THROW(BoxSet(Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(1.0, 0.0)), ProblemError);
  EXPECT_THROW(BoxSet(Eigen::Vector2d(0.0, 0.0), Eigen::Vector3d(1.0, 1.0, 1.0)), ProblemError);
  EXPECT_NO_THROW(BoxSet(Eigen::Vector2d(1.0, 1.0), Eigen::Vector2d(1.0, 1.0)));
}

TEST(BoxSet, ContainsIsExact) {
  const BoxSet box(Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, 1.0));
  EXPECT_TRUE(box.contains(Eigen::Vector2d(1.0, 0.0)));
  EXPECT_FALSE(box.contains(Eigen::Vector2d(1.0 + 1e-16 * 4, 0.0)));
  EXPECT_FALSE(box.contains(Eigen::Vector2d(0.5, -1e-300)));
}

TEST(QuadraticProblem, ValidatesHessian) {
  Eigen::Matrix2d asym;
  asym << 2.0, 1.0, 0.0, 2.0;
  auto b = [](Step) { return Eigen::VectorXd::Zero(2); };
  auto x = [](Step) { return BoxSet::symmetric(2, 1.0); };
  EXPECT_THROW(QuadraticProblem(asym, b, x, SpectralBounds{1.0, 3.0}), ProblemError);
  EXPECT_THROW(QuadraticProblem(Eigen::Matrix2d::Identity() * 7.0, b, x, SpectralBounds{1.0, 6.0}), ProblemError);
  EXPECT_THROW(QuadraticProblem(Eigen::Matrix2d::Identity(), b, x, SpectralBounds{0.0, 6.0}), ProblemError);
}

TEST(QuadraticProblem, GradientAndCost) {
  const auto p = diagonal_problem();
  const Eigen::Vector2d x(1.0, -1.0);
  const Eigen::VectorXd g = p.gradient(3, x);
  EXPECT_DOUBLE_EQ(g(0), 1.0 + 3.0);
  EXPECT_DOUBLE_EQ(g(1), -4.0 + 3.0);
  EXPECT_DOUBLE_EQ(p.cost(3, x), 0.5 * (1.0 + 4.0) + 3.0 * (1.0 - 1.0));
  EXPECT_EQ(eval_gradient(p, 3, x), g);
}

TEST(QuadraticProblem, HorizonIsEnforced) {
  const auto p = diagonal_problem(10);
  EXPECT_NO_THROW(p.linear_term(9));
  EXPECT_THROW(p.linear_term(10), std::out_of_range);
  EXPECT_THROW(p.constraints(-1), std::out_of_range);
}

TEST(Spectrum, DiagonalMatrix) {
  const auto s = spectrum_of(Eigen::Vector3d(3.0, 1.0, 2.0).asDiagonal());
  EXPECT_NEAR(s.low, 1.0, 1e-14);
  EXPECT_NEAR(s.high, 3.0, 1e-14);
}

TEST(TriangularReference, ShapeOverOnePeriod) {
  const Eigen::Vector2d offset(1.0, -1.0);
  EXPECT_DOUBLE_EQ(triangular_reference(0, 100, 2.0, offset)(0), 1.0);
  EXPECT_DOUBLE_EQ(triangular_reference(50, 100, 2.0, offset)(0), 3.0);
  EXPECT_DOUBLE_EQ(triangular_reference(25, 100, 2.0, offset)(1), 0.0);
  EXPECT_DOUBLE_EQ(triangular_reference(100, 100, 2.0, offset)(0), 1.0);
  EXPECT_THROW(triangular_reference(0, 1, 2.0, offset), std::invalid_argument);
}

}  // namespace
}  // namespace imopt
