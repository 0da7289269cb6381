#include <cmath>
#include <complex>
#include <set>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "pjt/error.hpp"
#include "pjt/oscillator.hpp"

namespace pjt {
namespace {

Eigen::MatrixXd dense(const OscMatrix& m) { return Eigen::MatrixXd(m); }

TEST(OscBasis, Dimensions) {
  EXPECT_EQ(OscBasis::build(0).dim(), 1);
  EXPECT_EQ(OscBasis::build(40).dim(), 861);
  EXPECT_EQ(OscBasis::build(60).dim(), 1891);
}

TEST(OscBasis, EnumerationIsABijectionOrderedByShellThenNx) {
  const OscBasis b = OscBasis::build(12);
  std::set<std::pair<int, int>> seen;
  std::pair<int, int> prev{-1, -1};
  for (std::int32_t k = 0; k < b.dim(); ++k) {
    const auto [nx, ny] = b.quanta(k);
    EXPECT_EQ(b.index(nx, ny), k);
    EXPECT_TRUE(seen.insert({nx, ny}).second);
    const std::pair<int, int> key{nx + ny, nx};
    EXPECT_LT(prev, key);
    prev = key;
  }
  EXPECT_EQ(static_cast<int>(seen.size()), b.dim());
}

TEST(OscBasis, RejectsCutoffBeyondBudget) {
  EXPECT_THROW(OscBasis::build(40, 1000), InvalidInput);
  EXPECT_THROW(OscBasis::build(-1), InvalidInput);
  EXPECT_NO_THROW(OscBasis::build(40, 4 * 861));
}

TEST(PositionOperator, LadderElements) {
  const OscBasis b = OscBasis::build(1);
  const Eigen::MatrixXd x = dense(position_operator(b, Axis::X).matrix);
  EXPECT_DOUBLE_EQ(x(b.index(1, 0), b.index(0, 0)), 1.0 / std::sqrt(2.0));
  EXPECT_EQ(x(b.index(0, 0), b.index(0, 0)), 0.0);
  const Eigen::MatrixXd y = dense(position_operator(b, Axis::Y).matrix);
  EXPECT_DOUBLE_EQ(y(b.index(0, 1), b.index(0, 0)), 1.0 / std::sqrt(2.0));
  EXPECT_EQ(y(b.index(1, 0), b.index(0, 0)), 0.0);
}

// Largest root of the Hermite polynomial H_n by Newton iteration on the three-term recurrence.
double largest_hermite_root(int n) {
  double x = std::sqrt(2.0 * n + 1.0);
  for (int it = 0; it < 100; ++it) {
    double h0 = 1.0, h1 = 2.0 * x;
    for (int k = 1; k < n; ++k) {
      const double h2 = 2.0 * x * h1 - 2.0 * k * h0;
      h0 = h1;
      h1 = h2;
    }
    const double deriv = 2.0 * n * h0;  // H_n' = 2n H_{n-1}
    const double step = h1 / deriv;
    x -= step;
    if (std::abs(step) < 1e-15 * x) break;
  }
  return x;
}

TEST(PositionOperator, EigenvaluesAreGaussHermiteNodes) {
  const int n = 60;
  const OscBasis b = OscBasis::build(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(position_operator(b, Axis::X).matrix),
                                                    Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  // The n_y = 0 block is the (n+1)-point Jacobi matrix of the Hermite weight.
  EXPECT_NEAR(top, largest_hermite_root(n + 1), 1e-9);
  EXPECT_LT(top, std::sqrt(2.0 * (n + 1) + 1.0));
  EXPECT_GT(top, 0.9 * std::sqrt(2.0 * n));
}

class OperatorIdentities : public ::testing::TestWithParam<int> {};

TEST_P(OperatorIdentities, QuadraticOperatorsMatchExactProducts) {
  const int n = GetParam();
  const OscBasis b = OscBasis::build(n);
  const OscBasis big = OscBasis::build(n + 2);
  const QuadraticOperators q = quadratic_operators(b);
  const Eigen::MatrixXd xb = dense(position_operator(big, Axis::X).matrix);
  const Eigen::MatrixXd yb = dense(position_operator(big, Axis::Y).matrix);
  // Projection P from the enlarged basis: the first dim(b) states coincide.
  const Eigen::Index d = b.dim();
  const Eigen::MatrixXd x2 = (xb * xb).topLeftCorner(d, d);
  const Eigen::MatrixXd y2 = (yb * yb).topLeftCorner(d, d);
  const Eigen::MatrixXd xy = (xb * yb).topLeftCorner(d, d);
  EXPECT_LT((dense(q.x2.matrix) - x2).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((dense(q.y2.matrix) - y2).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((dense(q.xy.matrix) - xy).cwiseAbs().maxCoeff(), 1e-12);

  // Truncated products agree with the exact operator on columns whose image stays inside.
  const Eigen::MatrixXd x = dense(position_operator(b, Axis::X).matrix);
  const Eigen::MatrixXd xx = x * x;
  for (std::int32_t k = 0; k < b.dim(); ++k) {
    const auto [nx, ny] = b.quanta(k);
    if (nx + ny <= n - 1) EXPECT_LT((xx.col(k) - dense(q.x2.matrix).col(k)).cwiseAbs().maxCoeff(), 1e-12);
  }

  // Diagonal of X^2 + Y^2 is n + 1 on every state.
  const Eigen::MatrixXd r2 = dense(q.x2.matrix) + dense(q.y2.matrix);
  for (std::int32_t k = 0; k < b.dim(); ++k) {
    const auto [nx, ny] = b.quanta(k);
    EXPECT_NEAR(r2(k, k), nx + ny + 1.0, 1e-14);
  }
}

TEST_P(OperatorIdentities, RealOperatorsAreExactlySymmetric) {
  const OscBasis b = OscBasis::build(GetParam());
  const QuadraticOperators q = quadratic_operators(b);
  for (const OscMatrix* m : {&q.x2.matrix, &q.y2.matrix, &q.xy.matrix}) {
    const Eigen::MatrixXd d = dense(*m);
    EXPECT_EQ((d - d.transpose()).cwiseAbs().maxCoeff(), 0.0);
  }
  for (Axis a : {Axis::X, Axis::Y}) {
    const Eigen::MatrixXd d = dense(position_operator(b, a).matrix);
    EXPECT_EQ((d - d.transpose()).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST_P(OperatorIdentities, C3IsAnOrthogonalOrderThreeRotationCommutingWithN) {
  const OscBasis b = OscBasis::build(GetParam());
  const Eigen::MatrixXd c3 = dense(c3_rotation(b).matrix);
  const Eigen::MatrixXd nn = dense(number_operator(b).matrix);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(b.dim(), b.dim());
  EXPECT_LT((c3.transpose() * c3 - id).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((c3 * c3 * c3 - id).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ((c3 * nn - nn * c3).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_NEAR(c3(0, 0), 1.0, 1e-15);
}

TEST_P(OperatorIdentities, C3RotatesThePositionVector) {
  // R X R^T = cos(t) X - sin(t) Y with t = 2 pi / 3 (active rotation of the coordinates).
  const OscBasis b = OscBasis::build(GetParam());
  const Eigen::MatrixXd c3 = dense(c3_rotation(b).matrix);
  const Eigen::MatrixXd x = dense(position_operator(b, Axis::X).matrix);
  const Eigen::MatrixXd y = dense(position_operator(b, Axis::Y).matrix);
  const double t = 2.0 * M_PI / 3.0;
  const Eigen::MatrixXd rx = c3 * x * c3.transpose();
  const Eigen::MatrixXd expect_a = std::cos(t) * x - std::sin(t) * y;
  const Eigen::MatrixXd expect_b = std::cos(t) * x + std::sin(t) * y;
  const double da = (rx - expect_a).cwiseAbs().maxCoeff(), db = (rx - expect_b).cwiseAbs().maxCoeff();
  EXPECT_LT(std::min(da, db), 1e-12);
}

TEST_P(OperatorIdentities, C2PrimeReflection) {
  const OscBasis b = OscBasis::build(GetParam());
  const Eigen::MatrixXd c2 = dense(c2prime_reflection(b).matrix);
  const Eigen::MatrixXd c3 = dense(c3_rotation(b).matrix);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(b.dim(), b.dim());
  EXPECT_EQ((c2 * c2 - id).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LT((c2 * c3 * c2 - c3.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  if (GetParam() >= 1) EXPECT_EQ(c2(b.index(0, 1), b.index(0, 1)), -1.0);
}

INSTANTIATE_TEST_SUITE_P(Cutoffs, OperatorIdentities, ::testing::Values(2, 5, 10, 40));

TEST(QuadraticOperators, WorkedElements) {
  const OscBasis b = OscBasis::build(2);
  const QuadraticOperators q = quadratic_operators(b);
  EXPECT_DOUBLE_EQ(q.x2.matrix.coeff(b.index(0, 0), b.index(0, 0)), 0.5);
  EXPECT_DOUBLE_EQ(q.x2.matrix.coeff(b.index(2, 0), b.index(0, 0)), std::sqrt(2.0) / 2.0);
  EXPECT_DOUBLE_EQ(q.xy.matrix.coeff(b.index(1, 1), b.index(0, 0)), 0.5);
}

TEST(C2Prime, FlipsOddNy) {
  const OscBasis b = OscBasis::build(3);
  const OscMatrix c2 = c2prime_reflection(b).matrix;
  EXPECT_EQ(c2.coeff(b.index(0, 1), b.index(0, 1)), -1.0);
  EXPECT_EQ(c2.coeff(b.index(2, 1), b.index(2, 1)), -1.0);
  EXPECT_EQ(c2.coeff(b.index(1, 2), b.index(1, 2)), 1.0);
}

}  // namespace
}  // namespace pjt
