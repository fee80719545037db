#pragma once

#include <span>
#include <vector>

#include "dls/assembly.hpp"

namespace dls {

/// Cholesky factor stored by rows over the envelope of A: row i holds
/// L(i, first[i] .. i).
template <Scalar T>
struct EnvelopeCholesky {
  int n = 0;
  std::vector<int> first;
  std::vector<std::size_t> start;  // offset of row i in val
  std::vector<T> val;

  T at(int i, int j) const { return val[start[i] + (j - first[i])]; }
  Vector<T> solve(std::span<const T> b) const;
  std::size_t stored() const { return val.size(); }
};

template <Scalar T>
EnvelopeCholesky<T> envelope_cholesky(const SparseMatrix<T>& a);

/// Upper-triangular factor of a row-blocked least-squares problem together
/// with Q* l. Row j of R is stored densely from column j to its last nonzero.
template <Scalar T>
struct RowMergeQr {
  int n = 0;
  int m = 0;  // rows of the original problem
  std::vector<Vector<T>> r;
  Vector<T> qtb;
  double residual = 0;  // ||l - B x|| at the minimizer, accumulated during the merge

  real_t<T> max_diagonal() const;
  real_t<T> min_diagonal() const;
  Vector<T> solve() const;
};

/// Each row block is first triangularized with Householder reflectors (in
/// parallel), then its rows are merged into R with Givens rotations in
/// element order. A column whose pivot falls below 100 eps times its own
/// norm is reported as RankDeficient.
template <Scalar T>
RowMergeQr<T> row_merge_qr(const RowBlockedMatrix<T>& b, std::span<const T> l,
                           Execution execution = Execution::parallel);

}  // namespace dls
