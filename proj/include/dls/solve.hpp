#pragma once

#include <span>
#include <utility>
#include <vector>

#include "dls/assembly.hpp"

namespace dls {

enum class SolverKind { ne, qr };

struct SolveOptions {
  bool precondition_global = true;
  bool dense = false;  // dense Cholesky / Householder instead of the sparse factorizations
  Execution execution = Execution::parallel;
};

template <Scalar T>
struct Solution {
  SolverKind solver = SolverKind::ne;
  Vector<T> reduced;        // unknowns of the global system: correction to the lift
  Vector<T> coefficients;   // every global trial DOF: lift, interface and bubbles
  Vector<T> residual;       // whitened element residuals, element-major
  std::vector<double> eta;  // per-element indicators
  double residual_norm = 0;
};

template <Scalar T>
Solution<T> solve_ne(const NormalSystem<T>& system, const SolveOptions& options = {});

template <Scalar T>
Solution<T> solve_ls(const OverdeterminedSystem<T>& system, const SolveOptions& options = {});

/// Rebuilds the full coefficient vector (bubbles recovered, lift added) from
/// a reduced solution and evaluates the element indicators.
template <Scalar T>
Solution<T> complete(const AssemblyRecord<T>& record, Vector<T> reduced, SolverKind solver,
                     Execution execution = Execution::parallel);

/// Cu = d on the reduced unknowns, weight alpha for the method of weighting.
template <Scalar T>
struct ConstraintSystem {
  DenseMatrix<T> c;
  Vector<T> d;
  double alpha = 1e6;
};

/// Stacked least squares [alpha C; B~] u ~ [alpha d; l~] (dense).
template <Scalar T>
Solution<T> solve_weighted_constraints(const OverdeterminedSystem<T>& system, const ConstraintSystem<T>& constraints,
                                       const SolveOptions& options = {});

/// [A C*; C 0][u; w] = [f; d] (dense). Returns the solution and the multipliers.
template <Scalar T>
std::pair<Solution<T>, Vector<T>> solve_saddle_constraints(const NormalSystem<T>& system,
                                                           const ConstraintSystem<T>& constraints,
                                                           const SolveOptions& options = {});

/// ||B u - l|| / (||B||_2 ||u||); +infinity for u = 0.
template <Scalar T>
double residual_rho(const RowBlockedMatrix<T>& b, std::span<const T> l, std::span<const T> u);

/// Spectral norm of B by power iteration on B* B.
template <Scalar T>
double spectral_norm(const RowBlockedMatrix<T>& b);

/// cond(A) from the dense eigenvalues of A, in double.
template <Scalar T>
double condition_ne(const SparseMatrix<T>& a);

/// cond(B~) = sqrt(cond(B~* B~)), with B~* B~ accumulated in double.
template <Scalar T>
double condition_ls(const RowBlockedMatrix<T>& b);

}  // namespace dls
