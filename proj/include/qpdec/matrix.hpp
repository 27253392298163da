#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "qpdec/errors.hpp"
#include "qpdec/rational.hpp"

namespace qpdec {

using Vec3 = std::array<Rational, 3>;
using Mat3 = std::array<std::array<Rational, 3>, 3>;
using Mat2 = std::array<std::array<Rational, 2>, 2>;

// Dense rational matrix for the small exact systems in this project
// (coefficient stacks up to 6x4, pencil bookkeeping 3x3).
class RatMat {
 public:
  RatMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

  static RatMat identity(std::size_t n) {
    RatMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  RatMat transposed() const {
    RatMat t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  RatMat operator*(const RatMat& o) const {
    if (cols_ != o.rows_) throw InternalInconsistency("matrix product shape mismatch");
    RatMat p(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        if ((*this)(i, k) == 0) continue;
        for (std::size_t j = 0; j < o.cols_; ++j) p(i, j) += (*this)(i, k) * o(k, j);
      }
    return p;
  }

  bool operator==(const RatMat& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_; }

  // Reduced row echelon form; returns the pivot columns.
  std::vector<std::size_t> rref() {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols_ && row < rows_; ++col) {
      std::size_t sel = row;
      while (sel < rows_ && (*this)(sel, col) == 0) ++sel;
      if (sel == rows_) continue;
      swap_rows(sel, row);
      Rational inv = 1 / (*this)(row, col);
      for (std::size_t j = col; j < cols_; ++j) (*this)(row, j) *= inv;
      for (std::size_t i = 0; i < rows_; ++i) {
        if (i == row || (*this)(i, col) == 0) continue;
        Rational f = (*this)(i, col);
        for (std::size_t j = col; j < cols_; ++j) (*this)(i, j) -= f * (*this)(row, j);
      }
      pivots.push_back(col);
      ++row;
    }
    return pivots;
  }

  std::size_t rank() const {
    RatMat c = *this;
    return c.rref().size();
  }

  // Basis of the right null space.
  std::vector<std::vector<Rational>> kernel() const {
    RatMat c = *this;
    std::vector<std::size_t> pivots = c.rref();
    std::vector<bool> is_pivot(cols_, false);
    for (std::size_t p : pivots) is_pivot[p] = true;
    std::vector<std::vector<Rational>> basis;
    for (std::size_t free_col = 0; free_col < cols_; ++free_col) {
      if (is_pivot[free_col]) continue;
      std::vector<Rational> v(cols_);
      v[free_col] = 1;
      for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -c(r, free_col);
      basis.push_back(std::move(v));
    }
    return basis;
  }

  // Unique-or-any solution of A x = b when consistent.
  std::optional<std::vector<Rational>> solve(const std::vector<Rational>& b) const {
    if (b.size() != rows_) throw InternalInconsistency("solve: rhs size mismatch");
    RatMat aug(rows_, cols_ + 1);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) aug(i, j) = (*this)(i, j);
      aug(i, cols_) = b[i];
    }
    std::vector<std::size_t> pivots = aug.rref();
    for (std::size_t p : pivots)
      if (p == cols_) return std::nullopt;  // inconsistent
    std::vector<Rational> x(cols_);
    for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug(r, cols_);
    return x;
  }

  std::optional<RatMat> inverse() const {
    if (rows_ != cols_) return std::nullopt;
    RatMat aug(rows_, 2 * cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) aug(i, j) = (*this)(i, j);
      aug(i, cols_ + i) = 1;
    }
    if (aug.rref().size() != rows_) return std::nullopt;
    RatMat inv(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) inv(i, j) = aug(i, cols_ + j);
    return inv;
  }

  Rational det() const {
    if (rows_ != cols_) throw InternalInconsistency("det of non-square matrix");
    RatMat c = *this;
    Rational d = 1;
    for (std::size_t col = 0, row = 0; col < cols_; ++col, ++row) {
      std::size_t sel = row;
      while (sel < rows_ && c(sel, col) == 0) ++sel;
      if (sel == rows_) return 0;
      if (sel != row) {
        c.swap_rows(sel, row);
        d = -d;
      }
      d *= c(row, col);
      Rational inv = 1 / c(row, col);
      for (std::size_t i = row + 1; i < rows_; ++i) {
        if (c(i, col) == 0) continue;
        Rational f = c(i, col) * inv;
        for (std::size_t j = col; j < cols_; ++j) c(i, j) -= f * c(row, j);
      }
    }
    return d;
  }

 private:
  void swap_rows(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t k = 0; k < cols_; ++k) std::swap((*this)(i, k), (*this)(j, k));
  }

  std::size_t rows_, cols_;
  std::vector<Rational> a_;
};

inline RatMat from_mat3(const Mat3& m) {
  RatMat r(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = m[i][j];
  return r;
}

inline Mat3 to_mat3(const RatMat& r) {
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = r(i, j);
  return m;
}

}  // namespace qpdec
