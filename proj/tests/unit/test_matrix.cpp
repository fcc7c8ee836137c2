#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "jca/errors.hpp"
#include "jca/matrix.hpp"
#include "oracle.hpp"

namespace jca {
namespace {

TEST(Matrix, MatmulIdentity) {
  const Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
  EXPECT_TRUE(bitwise_equal(matmul(a, Matrix::identity(2)), a));
}

TEST(Matrix, MatmulRowByColumn) {
  const Matrix c = matmul(Matrix::from_rows({{1, 2}}), Matrix::from_rows({{3}, {4}}));
  ASSERT_EQ(c.rows(), 1u);
  ASSERT_EQ(c.cols(), 1u);
  EXPECT_EQ(c(0, 0), 11.0);
}

TEST(Matrix, MatmulMatchesTripleLoop) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = testing::random_matrix(3, 4, rng);
    const Matrix b = testing::random_matrix(4, 2, rng);
    const Matrix expected = oracle::to_matrix(oracle::triple_loop(oracle::to_grid(a), oracle::to_grid(b)));
    // same ascending summation order, so exact
    EXPECT_TRUE(bitwise_equal(matmul(a, b), expected));
    EXPECT_LE(max_abs_diff(matmul(a, b), expected), 1e-15);
  }
}

TEST(Matrix, MatmulShapeErrorNamesBothShapes) {
  try {
    matmul(Matrix(2, 3), Matrix(2, 3));
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("2x3 x 2x3"), std::string::npos) << msg;
  }
}

TEST(Matrix, MatmulAssociative) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix a = testing::random_matrix(3, 5, rng);
    const Matrix b = testing::random_matrix(5, 4, rng);
    const Matrix c = testing::random_matrix(4, 2, rng);
    const Matrix left = matmul(matmul(a, b), c);
    const Matrix right = matmul(a, matmul(b, c));
    EXPECT_LE(max_abs_diff(left, right), 1e-10 * std::max(1.0, max_abs(left)));
  }
}

TEST(Matrix, Transpose) {
  const Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
  EXPECT_EQ(transpose(a), Matrix::from_rows({{1, 3}, {2, 4}}));
  EXPECT_TRUE(bitwise_equal(transpose(transpose(a)), a));
  const Matrix row = Matrix::from_rows({{1, 2, 3}});
  EXPECT_EQ(transpose(row).rows(), 3u);
  EXPECT_EQ(transpose(row).cols(), 1u);
}

TEST(Matrix, Elementwise) {
  EXPECT_EQ(ew_tanh(Matrix(2, 3)), Matrix(2, 3));
  EXPECT_EQ(ew_relu(Matrix::from_rows({{-1, 2}})), Matrix::from_rows({{0, 2}}));
  EXPECT_NEAR(ew_tanh(Matrix::from_rows({{0.5}}))(0, 0), 0.46211715726000974, 1e-15);
  EXPECT_EQ(scale(Matrix::from_rows({{1, -2}}), 3.0), Matrix::from_rows({{3, -6}}));
  EXPECT_EQ(add(Matrix::from_rows({{1, 2}}), Matrix::from_rows({{3, 4}})), Matrix::from_rows({{4, 6}}));
  EXPECT_THROW(add(Matrix(1, 2), Matrix(2, 1)), ShapeError);
}

TEST(Matrix, TanhAndReluRanges) {
  Rng rng(3);
  const Matrix a = testing::random_matrix(10, 10, rng, 50.0);
  const Matrix t = ew_tanh(a);
  for (double v : t.data()) {
    EXPECT_GE(v, -1.0);
    EXPECT_LE(v, 1.0);
  }
  const Matrix r = ew_relu(a);
  for (double v : r.data()) EXPECT_GE(v, 0.0);
}

TEST(Matrix, ConcatCols) {
  const Matrix a(4, 2, 1.0), b(4, 3, 2.0);
  const Matrix c = concat_cols(a, b);
  EXPECT_EQ(c.rows(), 4u);
  EXPECT_EQ(c.cols(), 5u);
  EXPECT_TRUE(bitwise_equal(slice_cols(c, 0, 2), a));
  EXPECT_TRUE(bitwise_equal(concat_cols(a, Matrix(4, 0)), a));
  EXPECT_EQ(concat_cols(Matrix::from_rows({{1}, {2}}), Matrix::from_rows({{3}, {4}})),
            Matrix::from_rows({{1, 3}, {2, 4}}));
  EXPECT_THROW(concat_cols(Matrix(2, 1), Matrix(3, 1)), ShapeError);
}

TEST(Matrix, ConcatPrefixIsLeftOperandBitwise) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = testing::random_matrix(3, 1 + trial % 4, rng);
    const Matrix b = testing::random_matrix(3, 2, rng);
    EXPECT_TRUE(bitwise_equal(slice_cols(concat_cols(a, b), 0, a.cols()), a));
  }
}

TEST(Matrix, SolveSpd) {
  const Matrix a = Matrix::from_rows({{4, 1}, {1, 3}});
  const Matrix b = Matrix::from_rows({{1}, {2}});
  const Matrix x = solve_spd(a, b);
  EXPECT_LE(max_abs_diff(matmul(a, x), b), 1e-14);
  EXPECT_THROW(solve_spd(Matrix::from_rows({{0, 1}, {1, 0}}), b), NumericError);
}

}  // namespace
}  // namespace jca
