#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "cbrm/rational.hpp"

namespace cbrm {

/// Dense row-major matrix of exact rationals.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::initializer_list<std::initializer_list<Rational>> rows);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<std::vector<Rational>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Rational& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::vector<Rational> row(std::size_t r) const;
  std::vector<Rational> row_sums() const;

  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend Matrix operator+(const Matrix& a, const Matrix& b);
  friend Matrix operator-(const Matrix& a, const Matrix& b);
  friend bool operator==(const Matrix& a, const Matrix& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

/// Exact inverse by Gauss-Jordan elimination. The pivot in each column is the
/// entry of largest magnitude at or below the diagonal.
/// Throws Error(SingularMatrix) if no non-zero pivot exists.
Matrix invert(const Matrix& m);

/// Row vector times matrix.
std::vector<Rational> multiply(const std::vector<Rational>& row, const Matrix& m);

}  // namespace cbrm
