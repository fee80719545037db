#pragma once

#include <utility>

#include "dls/dense.hpp"
#include "dls/errors.hpp"

namespace dls {

/// Lower Cholesky factor L of a Hermitian positive definite G = LL*.
template <Scalar T>
DenseMatrix<T> cholesky(const DenseMatrix<T>& g);

/// Solves LX = M for lower-triangular L.
template <Scalar T>
DenseMatrix<T> triangular_solve(const DenseMatrix<T>& l, const DenseMatrix<T>& m);
template <Scalar T>
Vector<T> triangular_solve(const DenseMatrix<T>& l, const Vector<T>& b);

/// Solves L*x = b for lower-triangular L.
template <Scalar T>
Vector<T> triangular_adjoint_solve(const DenseMatrix<T>& l, const Vector<T>& b);

/// Solves Rx = b using the leading n x n upper triangle of r.
template <Scalar T>
Vector<T> upper_solve(const DenseMatrix<T>& r, std::span<const T> b);

/// Householder QR without pivoting. The reflectors live below the diagonal of
/// `packed`, R on and above it. R has a real nonnegative diagonal.
template <Scalar T>
struct QrFactors {
  DenseMatrix<T> packed;
  Vector<T> tau;

  int rows() const { return packed.rows(); }
  int cols() const { return packed.cols(); }

  DenseMatrix<T> r() const;
  /// Explicit thin Q (rows x cols).
  DenseMatrix<T> thin_q() const;
  /// b <- Q* b, in place; b.size() == rows().
  void apply_qh(std::span<T> b) const;
  /// b <- Q b, in place.
  void apply_q(std::span<T> b) const;
  /// Q* M column by column.
  DenseMatrix<T> apply_qh(const DenseMatrix<T>& m) const;

  real_t<T> max_diagonal() const;
  real_t<T> min_diagonal() const;
  /// True when min |R_jj| < rows * eps * max |R_jj|.
  bool rank_deficient() const;
};

template <Scalar T>
QrFactors<T> householder_qr(const DenseMatrix<T>& m);

/// argmin ||Mx - b||_2; throws RankDeficient.
template <Scalar T>
Vector<T> least_squares_qr(const DenseMatrix<T>& m, const Vector<T>& b);

template <Scalar T>
Vector<T> solve_spd(const DenseMatrix<T>& a, const Vector<T>& f);

/// sigma_max / sigma_min over nonzero singular values, computed in double.
template <Scalar T>
double condition_number(const DenseMatrix<T>& m);

/// Singular values (descending) of a Hermitian positive semidefinite matrix
/// given as M*M; helper shared with the condition number of row-blocked
/// operators.
template <Scalar T>
std::vector<double> hermitian_abs_eigenvalues(const DenseMatrix<T>& h);

/// Solves [A C*; C 0][u; w] = [f; d].
template <Scalar T>
std::pair<Vector<T>, Vector<T>> saddle_solve(const DenseMatrix<T>& a, const DenseMatrix<T>& c,
                                              const Vector<T>& f, const Vector<T>& d);

/// Dense LU with partial pivoting; throws SingularSaddle on a vanishing pivot.
template <Scalar T>
Vector<T> lu_solve(DenseMatrix<T> a, Vector<T> b);

}  // namespace dls
