#include "dls/element.hpp"

#include <cmath>

#include "dls/errors.hpp"

namespace dls {

template <class D>
ElementSystem<D> compute_element(const Formulation& form, const Element& element, const ManufacturedCase& data) {
  auto m = eval_forms<D>(form, element, data);
  ElementSystem<D> s;
  s.direct = form.direct;
  s.g = std::move(m.g);
  s.b = std::move(m.b);
  s.l = std::move(m.l);
  s.a = std::move(m.a);
  s.f = std::move(m.f);
  return s;
}

template <Scalar T>
void precondition_gram(DenseMatrix<T>& g, DenseMatrix<T>& b, Vector<T>& l) {
  using R = real_t<T>;
  const int n = g.rows();
  std::vector<R> s(n);
  for (int i = 0; i < n; ++i) {
    const R d = real_part(g(i, i));
    if (!(d > 0)) throw NonpositiveDiagonal("Gram diagonal entry " + std::to_string(i) + " is not positive");
    s[i] = R(1) / std::sqrt(d);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g(i, j) *= s[i] * s[j];
    g(i, i) = T(1);
    for (int j = 0; j < b.cols(); ++j) b(i, j) *= s[i];
    if (!l.empty()) l[i] *= s[i];
  }
}

template <Scalar T>
void whiten(ElementSystem<T>& system) {
  const auto chol = cholesky(system.g);
  system.bt = triangular_solve(chol, system.b);
  system.lt = triangular_solve(chol, system.l);
}

template <Scalar T>
std::pair<DenseMatrix<T>, Vector<T>> element_ne(const DenseMatrix<T>& bt, const Vector<T>& lt) {
  return {adjoint_multiply(bt, bt), adjoint_multiply(bt, lt)};
}

namespace {

std::vector<int> free_columns(std::span<const char> fixed, int n) {
  std::vector<int> cols;
  for (int j = 0; j < n; ++j)
    if (fixed.empty() || !fixed[j]) cols.push_back(j);
  return cols;
}

}  // namespace

template <Scalar T>
std::pair<DenseMatrix<T>, Vector<T>> apply_dirichlet(const DenseMatrix<T>& bt, const Vector<T>& lt,
                                                     std::span<const char> fixed, std::span<const T> lift) {
  Vector<T> rhs = lt;
  if (!lift.empty()) {
    const auto shift = multiply(bt, lift);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] -= shift[i];
  }
  return {select_columns(bt, free_columns(fixed, bt.cols())), std::move(rhs)};
}

template <Scalar T>
std::pair<DenseMatrix<T>, Vector<T>> apply_dirichlet_square(const DenseMatrix<T>& a, const Vector<T>& f,
                                                            std::span<const char> fixed, std::span<const T> lift) {
  const auto cols = free_columns(fixed, a.cols());
  Vector<T> full = f;
  if (!lift.empty()) {
    const auto shift = multiply(a, lift);
    for (std::size_t i = 0; i < full.size(); ++i) full[i] -= shift[i];
  }
  Vector<T> rhs(cols.size());
  for (std::size_t i = 0; i < cols.size(); ++i) rhs[i] = full[cols[i]];
  return {select_block(a, cols, cols), std::move(rhs)};
}

namespace {

void partition(std::span<const char> bubble, int n, std::vector<int>& b, std::vector<int>& i) {
  for (int j = 0; j < n; ++j) (!bubble.empty() && bubble[j] ? b : i).push_back(j);
}

}  // namespace

template <Scalar T>
CondensedElement<T> condense_ls(const DenseMatrix<T>& bt, const Vector<T>& lt, std::span<const char> bubble) {
  CondensedElement<T> c;
  c.least_squares = true;
  partition(bubble, bt.cols(), c.bubble, c.interface);
  c.bt_interface = select_columns(bt, c.interface);
  c.lt = lt;
  c.matrix = c.bt_interface;
  c.rhs = lt;
  if (c.bubble.empty()) return c;

  c.bubble_qr = householder_qr(select_columns(bt, c.bubble));
  if (c.bubble_qr.rank_deficient())
    throw RankDeficientBubbles("bubble block of the whitened element matrix is rank deficient");
  const int nb = int(c.bubble.size());
  const int m = bt.rows();
  // (I - QQ*) x: rotate into the Q basis, drop the bubble range, rotate back.
  auto project = [&](std::span<T> x) {
    c.bubble_qr.apply_qh(x);
    for (int k = 0; k < nb; ++k) x[k] = T(0);
    c.bubble_qr.apply_q(x);
  };
  Vector<T> col(m);
  for (int j = 0; j < c.matrix.cols(); ++j) {
    for (int i = 0; i < m; ++i) col[i] = c.matrix(i, j);
    project(col);
    for (int i = 0; i < m; ++i) c.matrix(i, j) = col[i];
  }
  project(c.rhs);
  return c;
}

template <Scalar T>
CondensedElement<T> condense_ne(const DenseMatrix<T>& a, const Vector<T>& f, std::span<const char> bubble) {
  CondensedElement<T> c;
  c.least_squares = false;
  partition(bubble, a.cols(), c.bubble, c.interface);
  const auto& bi = c.bubble;
  const auto& ii = c.interface;
  c.matrix = select_block(a, ii, ii);
  c.rhs.resize(ii.size());
  for (std::size_t k = 0; k < ii.size(); ++k) c.rhs[k] = f[ii[k]];
  if (bi.empty()) return c;

  try {
    c.bubble_cholesky = cholesky(select_block(a, bi, bi));
  } catch (const NotPositiveDefinite&) {
    throw SingularBubbleBlock("bubble block of the element normal matrix is not positive definite");
  }
  c.a_bubble_interface = select_block(a, bi, ii);
  c.f_bubble.resize(bi.size());
  for (std::size_t k = 0; k < bi.size(); ++k) c.f_bubble[k] = f[bi[k]];

  // X = L^-1 A_bi, y = L^-1 f_b; S = A_ii - X*X, g = f_i - X*y.
  const auto x = triangular_solve(c.bubble_cholesky, c.a_bubble_interface);
  const auto y = triangular_solve(c.bubble_cholesky, c.f_bubble);
  c.matrix = subtract(c.matrix, adjoint_multiply(x, x));
  c.rhs = subtract(c.rhs, adjoint_multiply(x, y));
  return c;
}

template <Scalar T>
Vector<T> recover_bubbles(const CondensedElement<T>& c, const Vector<T>& u_interface) {
  const int nb = int(c.bubble.size());
  if (nb == 0) return {};
  if (c.least_squares) {
    Vector<T> r = c.lt;
    const auto bu = multiply(c.bt_interface, u_interface);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= bu[i];
    c.bubble_qr.apply_qh(r);
    r.resize(nb);
    return upper_solve(c.bubble_qr.r(), std::span<const T>(r));
  }
  Vector<T> rhs = subtract(c.f_bubble, multiply(c.a_bubble_interface, u_interface));
  return triangular_adjoint_solve(c.bubble_cholesky, triangular_solve(c.bubble_cholesky, rhs));
}

template ElementSystem<double> compute_element(const Formulation&, const Element&, const ManufacturedCase&);
template ElementSystem<cdouble> compute_element(const Formulation&, const Element&, const ManufacturedCase&);

#define DLS_INSTANTIATE(T)                                                                                        \
  template void precondition_gram(DenseMatrix<T>&, DenseMatrix<T>&, Vector<T>&);                                  \
  template void whiten(ElementSystem<T>&);                                                                        \
  template std::pair<DenseMatrix<T>, Vector<T>> element_ne(const DenseMatrix<T>&, const Vector<T>&);              \
  template std::pair<DenseMatrix<T>, Vector<T>> apply_dirichlet(const DenseMatrix<T>&, const Vector<T>&,          \
                                                                std::span<const char>, std::span<const T>);       \
  template std::pair<DenseMatrix<T>, Vector<T>> apply_dirichlet_square(const DenseMatrix<T>&, const Vector<T>&,   \
                                                                       std::span<const char>, std::span<const T>); \
  template CondensedElement<T> condense_ls(const DenseMatrix<T>&, const Vector<T>&, std::span<const char>);       \
  template CondensedElement<T> condense_ne(const DenseMatrix<T>&, const Vector<T>&, std::span<const char>);       \
  template Vector<T> recover_bubbles(const CondensedElement<T>&, const Vector<T>&);

DLS_INSTANTIATE(float)
DLS_INSTANTIATE(double)
DLS_INSTANTIATE(std::complex<float>)
DLS_INSTANTIATE(std::complex<double>)

}  // namespace dls
