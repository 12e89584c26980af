#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bvcheck/rational.hpp"

namespace bvcheck {

/// Dense row-major matrix of Gaussian rationals.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Complex(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Complex& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool is_zero() const {
    for (auto& x : a_)
      if (!x.is_zero()) return false;
    return true;
  }
  std::size_t nonzeros() const {
    std::size_t n = 0;
    for (auto& x : a_)
      if (!x.is_zero()) ++n;
    return n;
  }

  Matrix& operator+=(const Matrix& o) {
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
  }
  Matrix& operator*=(const Complex& z) {
    for (auto& x : a_) x *= z;
    return *this;
  }
  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, const Complex& z) { return a *= z; }
  friend Matrix operator*(const Complex& z, Matrix a) { return a *= z; }
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    Matrix r(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Complex& aik = a(i, k);
        if (aik.is_zero()) continue;
        for (std::size_t j = 0; j < b.cols_; ++j)
          if (!b(k, j).is_zero()) r(i, j) += aik * b(k, j);
      }
    return r;
  }
  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> a_;
};

/// Row-reduces in place following a given column order; returns the pivot
/// columns (in the order they were found).
inline std::vector<std::size_t> row_reduce(Matrix& m, const std::vector<std::size_t>& column_order) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col : column_order) {
    if (row == m.rows()) break;
    std::size_t p = row;
    while (p < m.rows() && m(p, col).is_zero()) ++p;
    if (p == m.rows()) continue;
    if (p != row)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(row, j));
    Complex inv = Complex(1) / m(row, col);
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (!m(row, j).is_zero()) m(row, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == row || m(i, col).is_zero()) continue;
      Complex f = m(i, col);
      for (std::size_t j = 0; j < m.cols(); ++j)
        if (!m(row, j).is_zero()) m(i, j) -= f * m(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

inline std::size_t rank(Matrix m) {
  std::vector<std::size_t> order(m.cols());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  return row_reduce(m, order).size();
}

using SparseRow = std::map<std::size_t, Complex>;

/// Rank of a sparse matrix given as rows; eliminates on the column of each
/// row's leading entry and keeps the remaining rows sparse.
inline std::size_t sparse_rank(std::vector<SparseRow> rows) {
  std::map<std::size_t, SparseRow> pivots;  // leading column -> normalized row
  for (auto& row : rows) {
    SparseRow r = std::move(row);
    while (!r.empty()) {
      auto lead = r.begin();
      auto it = pivots.find(lead->first);
      if (it == pivots.end()) {
        Complex inv = Complex(1) / lead->second;
        for (auto& [j, v] : r) v *= inv;
        std::size_t col = r.begin()->first;
        pivots.emplace(col, std::move(r));
        break;
      }
      Complex f = lead->second;
      for (auto& [j, v] : it->second) {
        auto [pos, fresh] = r.try_emplace(j, Complex());
        pos->second -= f * v;
        if (pos->second.is_zero()) r.erase(pos);
      }
    }
  }
  return pivots.size();
}

}  // namespace bvcheck
