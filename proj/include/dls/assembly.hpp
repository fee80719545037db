#pragma once

#include <span>
#include <vector>

#include "dls/discretization.hpp"
#include "dls/element.hpp"
#include "dls/parallel.hpp"

namespace dls {

struct AssemblyOptions {
  bool condense = true;
  bool precondition_gram = true;
  Execution execution = Execution::parallel;
};

/// Hermitian matrix in CSR form with both triangles stored; columns sorted
/// within each row.
template <Scalar T>
struct SparseMatrix {
  int n = 0;
  std::vector<int> row_start = {0};
  std::vector<int> col;
  std::vector<T> val;

  int nonzeros() const { return int(col.size()); }
  T diagonal(int i) const;
  Vector<T> multiply(std::span<const T> x) const;
};

/// One element's panel of the global rectangular matrix: dense rows over a
/// short list of global columns.
template <Scalar T>
struct RowBlock {
  int row_offset = 0;
  std::vector<int> cols;
  DenseMatrix<T> panel;
};

template <Scalar T>
struct RowBlockedMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<RowBlock<T>> blocks;

  Vector<T> multiply(std::span<const T> x) const;
  Vector<T> adjoint_multiply(std::span<const T> y) const;
};

/// What the element loop keeps per element to rebuild full coefficient
/// vectors and residual indicators after the global solve.
template <Scalar T>
struct ElementRecord {
  std::vector<int> free;        // local columns left after Dirichlet elimination
  std::vector<int> reduced;     // reduced global index per kept (interface) column
  CondensedElement<T> condensed;
  DenseMatrix<T> bt;            // full whitened element matrix (global orientation)
  Vector<T> lt;
  bool direct = false;
  DenseMatrix<T> a;             // direct elements: oriented (A_K, f_K)
  Vector<T> f;
};

/// Bookkeeping shared by both assemblies.
template <Scalar T>
struct AssemblyRecord {
  const Discretization* disc = nullptr;
  AssemblyOptions options;
  bool least_squares = true;
  Vector<T> lift;                       // full global vector
  std::vector<int> reduced_to_global;  // reduced index -> global trial DOF
  std::vector<ElementRecord<T>> elements;
  int rows = 0;                         // total whitened rows (LS)

  int reduced_size() const { return int(reduced_to_global.size()); }
};

template <Scalar T>
struct NormalSystem {
  SparseMatrix<T> a;
  Vector<T> f;
  AssemblyRecord<T> record;
};

template <Scalar T>
struct OverdeterminedSystem {
  RowBlockedMatrix<T> b;
  Vector<T> l;
  AssemblyRecord<T> record;
};

/// `lift` is any global vector holding the boundary data on the fixed DOFs
/// (empty means zero); the unknowns are the correction u - lift on the free
/// DOFs.
///
/// Normal-equation assembly: per element compute, orient, precondition the
/// Gram, whiten, form A_K, eliminate Dirichlet columns, condense, scatter.
template <Scalar T>
NormalSystem<T> assemble_ne(const Discretization& disc, const ManufacturedCase& data, const AssemblyOptions& options,
                            std::span<const cdouble> lift);

/// Overdetermined assembly: the same element pipeline but the whitened rows
/// themselves are placed in the global matrix, one row block per element.
template <Scalar T>
OverdeterminedSystem<T> assemble_overdetermined(const Discretization& disc, const ManufacturedCase& data,
                                                const AssemblyOptions& options, std::span<const cdouble> lift);

/// Symmetric Jacobi scaling s_j = 1/sqrt(d_j); the solution of the scaled
/// system maps back by u = s .* u_scaled.
template <Scalar T>
std::vector<real_t<T>> precondition_global(SparseMatrix<T>& a, Vector<T>& f);

/// Same with d_j = squared column norms of B~.
template <Scalar T>
std::vector<real_t<T>> precondition_global(RowBlockedMatrix<T>& b);

template <Scalar T>
DenseMatrix<T> densify(const SparseMatrix<T>& a);

template <Scalar T>
DenseMatrix<T> densify(const RowBlockedMatrix<T>& b);

/// B~* B~ accumulated block by block (sparse pattern of A).
template <Scalar T>
SparseMatrix<T> normal_matrix(const RowBlockedMatrix<T>& b);

/// Builds CSR from coordinate triplets; duplicates are summed in input order.
template <Scalar T>
SparseMatrix<T> from_triplets(int n, std::vector<int> rows, std::vector<int> cols, std::vector<T> vals);

}  // namespace dls
