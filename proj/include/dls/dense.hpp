#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <span>
#include <vector>

#include "dls/scalar.hpp"

namespace dls {

template <class T>
using Vector = std::vector<T>;

/// Row-major dense matrix.
template <class T>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(std::size_t(rows) * cols, T(0)) {}
  DenseMatrix(int rows, int cols, std::vector<T> data) : rows_(rows), cols_(cols), data_(std::move(data)) {
    assert(data_.size() == std::size_t(rows) * cols);
  }

  static DenseMatrix identity(int n) {
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  T& operator()(int i, int j) { return data_[std::size_t(i) * cols_ + j]; }
  const T& operator()(int i, int j) const { return data_[std::size_t(i) * cols_ + j]; }

  std::span<T> row(int i) { return {data_.data() + std::size_t(i) * cols_, std::size_t(cols_)}; }
  std::span<const T> row(int i) const { return {data_.data() + std::size_t(i) * cols_, std::size_t(cols_)}; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  Vector<T> column(int j) const {
    Vector<T> c(rows_);
    for (int i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

template <class To, class From>
DenseMatrix<To> matrix_cast(const DenseMatrix<From>& m) {
  DenseMatrix<To> out(m.rows(), m.cols());
  for (std::size_t k = 0; k < m.data().size(); ++k) out.data()[k] = scalar_cast<To>(m.data()[k]);
  return out;
}

template <class To, class From>
Vector<To> vector_cast(const Vector<From>& v) {
  Vector<To> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = scalar_cast<To>(v[k]);
  return out;
}

template <class T>
DenseMatrix<T> adjoint(const DenseMatrix<T>& m) {
  DenseMatrix<T> out(m.cols(), m.rows());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(j, i) = conj(m(i, j));
  return out;
}

template <class T>
DenseMatrix<T> multiply(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
  assert(a.cols() == b.rows());
  DenseMatrix<T> c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    auto ci = c.row(i);
    for (int k = 0; k < a.cols(); ++k) {
      const T aik = a(i, k);
      if (aik == T(0)) continue;
      auto bk = b.row(k);
      for (int j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

/// a^H b without forming the adjoint.
template <class T>
DenseMatrix<T> adjoint_multiply(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
  assert(a.rows() == b.rows());
  DenseMatrix<T> c(a.cols(), b.cols());
  for (int k = 0; k < a.rows(); ++k) {
    auto ak = a.row(k);
    auto bk = b.row(k);
    for (int i = 0; i < a.cols(); ++i) {
      const T aki = conj(ak[i]);
      if (aki == T(0)) continue;
      auto ci = c.row(i);
      for (int j = 0; j < b.cols(); ++j) ci[j] += aki * bk[j];
    }
  }
  return c;
}

template <class T>
Vector<T> multiply(const DenseMatrix<T>& a, std::span<const T> x) {
  assert(std::size_t(a.cols()) == x.size());
  Vector<T> y(a.rows(), T(0));
  for (int i = 0; i < a.rows(); ++i) {
    auto ai = a.row(i);
    T s(0);
    for (int j = 0; j < a.cols(); ++j) s += ai[j] * x[j];
    y[i] = s;
  }
  return y;
}

template <class T>
Vector<T> multiply(const DenseMatrix<T>& a, const Vector<T>& x) {
  return multiply(a, std::span<const T>(x));
}

template <class T>
Vector<T> adjoint_multiply(const DenseMatrix<T>& a, std::span<const T> x) {
  assert(std::size_t(a.rows()) == x.size());
  Vector<T> y(a.cols(), T(0));
  for (int i = 0; i < a.rows(); ++i) {
    auto ai = a.row(i);
    for (int j = 0; j < a.cols(); ++j) y[j] += conj(ai[j]) * x[i];
  }
  return y;
}

template <class T>
Vector<T> adjoint_multiply(const DenseMatrix<T>& a, const Vector<T>& x) {
  return adjoint_multiply(a, std::span<const T>(x));
}

template <class T>
real_t<T> frobenius_norm(const DenseMatrix<T>& m) {
  real_t<T> s(0);
  for (const T& v : m.data()) s += abs2(v);
  return std::sqrt(s);
}

template <class T>
real_t<T> norm2(std::span<const T> v) {
  real_t<T> s(0);
  for (const T& x : v) s += abs2(x);
  return std::sqrt(s);
}

template <class T>
real_t<T> norm2(const Vector<T>& v) {
  return norm2(std::span<const T>(v));
}

template <class T>
DenseMatrix<T> subtract(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
  assert(a.rows() == b.rows() && a.cols() == b.cols());
  DenseMatrix<T> c = a;
  for (std::size_t k = 0; k < c.data().size(); ++k) c.data()[k] -= b.data()[k];
  return c;
}

template <class T>
Vector<T> subtract(const Vector<T>& a, const Vector<T>& b) {
  assert(a.size() == b.size());
  Vector<T> c = a;
  for (std::size_t k = 0; k < c.size(); ++k) c[k] -= b[k];
  return c;
}

/// Columns `cols` of m, in the given order.
template <class T>
DenseMatrix<T> select_columns(const DenseMatrix<T>& m, std::span<const int> cols) {
  DenseMatrix<T> out(m.rows(), int(cols.size()));
  for (int i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, int(j)) = m(i, cols[j]);
  return out;
}

template <class T>
DenseMatrix<T> select_block(const DenseMatrix<T>& m, std::span<const int> rows, std::span<const int> cols) {
  DenseMatrix<T> out(int(rows.size()), int(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(int(i), int(j)) = m(rows[i], cols[j]);
  return out;
}

template <class T>
bool is_hermitian(const DenseMatrix<T>& m, real_t<T> tolerance) {
  if (m.rows() != m.cols()) return false;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < i; ++j)
      if (std::abs(m(i, j) - conj(m(j, i))) > tolerance) return false;
  return true;
}

}  // namespace dls
