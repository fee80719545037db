#pragma once

#include <span>
#include <utility>
#include <vector>

#include "dls/formulation.hpp"
#include "dls/linalg.hpp"

namespace dls {

/// Per-element triple (G, B, l) and its whitened form. Direct elements carry
/// (A, f) only.
template <Scalar T>
struct ElementSystem {
  DenseMatrix<T> g, b;
  Vector<T> l;
  DenseMatrix<T> bt;
  Vector<T> lt;
  bool direct = false;
  DenseMatrix<T> a;
  Vector<T> f;
};

template <Scalar T, Scalar From>
ElementSystem<T> system_cast(const ElementSystem<From>& s) {
  ElementSystem<T> out;
  out.g = matrix_cast<T>(s.g);
  out.b = matrix_cast<T>(s.b);
  out.l = vector_cast<T>(s.l);
  out.bt = matrix_cast<T>(s.bt);
  out.lt = vector_cast<T>(s.lt);
  out.direct = s.direct;
  out.a = matrix_cast<T>(s.a);
  out.f = vector_cast<T>(s.f);
  return out;
}

/// D is double for real formulations and std::complex<double> otherwise.
template <class D>
ElementSystem<D> compute_element(const Formulation& form, const Element& element, const ManufacturedCase& data);

/// G -> D^-1/2 G D^-1/2, B -> D^-1/2 B, l -> D^-1/2 l with D = diag(G).
template <Scalar T>
void precondition_gram(DenseMatrix<T>& g, DenseMatrix<T>& b, Vector<T>& l);

/// Fills bt = L^-1 B and lt = L^-1 l with G = LL*.
template <Scalar T>
void whiten(ElementSystem<T>& system);

/// (A_K, f_K) = (Bt* Bt, Bt* lt).
template <Scalar T>
std::pair<DenseMatrix<T>, Vector<T>> element_ne(const DenseMatrix<T>& bt, const Vector<T>& lt);

/// Moves the lift to the load (lt - Bt lift) and drops the fixed columns.
/// `lift` is a full local coefficient vector; `fixed` flags local columns.
template <Scalar T>
std::pair<DenseMatrix<T>, Vector<T>> apply_dirichlet(const DenseMatrix<T>& bt, const Vector<T>& lt,
                                                     std::span<const char> fixed, std::span<const T> lift);

/// Same for a square system: A_ff and (f - A lift)_f.
template <Scalar T>
std::pair<DenseMatrix<T>, Vector<T>> apply_dirichlet_square(const DenseMatrix<T>& a, const Vector<T>& f,
                                                            std::span<const char> fixed, std::span<const T> lift);

/// Element after elimination of its bubble columns. `matrix`/`rhs` act on the
/// interface columns only; the rest is kept to recover the bubbles.
template <Scalar T>
struct CondensedElement {
  bool least_squares = true;
  std::vector<int> bubble;     // local column indices
  std::vector<int> interface;  // local column indices
  DenseMatrix<T> matrix;       // (I - P) Bt_interf, or the Schur complement
  Vector<T> rhs;               // (I - P) lt, or the condensed load
  // Least-squares recovery data.
  QrFactors<T> bubble_qr;
  DenseMatrix<T> bt_interface;
  Vector<T> lt;
  // Normal-equation recovery data.
  DenseMatrix<T> bubble_cholesky;
  DenseMatrix<T> a_bubble_interface;
  Vector<T> f_bubble;
};

template <Scalar T>
CondensedElement<T> condense_ls(const DenseMatrix<T>& bt, const Vector<T>& lt, std::span<const char> bubble);

template <Scalar T>
CondensedElement<T> condense_ne(const DenseMatrix<T>& a, const Vector<T>& f, std::span<const char> bubble);

/// Bubble coefficients minimizing the local residual for fixed interface values.
template <Scalar T>
Vector<T> recover_bubbles(const CondensedElement<T>& element, const Vector<T>& u_interface);

}  // namespace dls
