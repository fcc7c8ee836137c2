#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace jca {

/// Dense row-major matrix of doubles.
///
/// Every operation below is a pure function returning a fresh value. There is
/// no broadcasting: operands must agree exactly or a ShapeError is thrown.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  /// Builds a matrix from nested row lists; all rows must have equal length.
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix identity(std::size_t n);
  static Matrix column(std::span<const double> values);
  static Matrix row(std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<double> row_span(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row_span(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  /// "RxC", used in error messages.
  std::string shape_string() const;

  bool same_shape(const Matrix& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  /// Exact value equality (0.0 == -0.0, NaN != NaN).
  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Standard product; inner index is summed in ascending order.
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

Matrix ew_tanh(const Matrix& a);
Matrix ew_relu(const Matrix& a);
/// Elementwise product.
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double s);

/// [a | b]: a's columns first.
Matrix concat_cols(const Matrix& a, const Matrix& b);
/// Columns [begin, end) of a.
Matrix slice_cols(const Matrix& a, std::size_t begin, std::size_t end);

bool all_finite(const Matrix& a) noexcept;
double max_abs(const Matrix& a) noexcept;
double max_abs_diff(const Matrix& a, const Matrix& b);
/// Byte-level equality of the stored doubles (distinguishes 0.0 from -0.0).
bool bitwise_equal(const Matrix& a, const Matrix& b) noexcept;

/// Solves a x = b for symmetric positive-definite a (Cholesky). b may have
/// several columns.
Matrix solve_spd(const Matrix& a, const Matrix& b);

}  // namespace jca
