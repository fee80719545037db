#include "dls/linalg.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>
#include <functional>

namespace dls {

template <Scalar T>
DenseMatrix<T> cholesky(const DenseMatrix<T>& g) {
  const int n = g.rows();
  if (g.cols() != n) throw NotPositiveDefinite("cholesky: matrix is not square");
  DenseMatrix<T> l(n, n);
  for (int j = 0; j < n; ++j) {
    auto lj = l.row(j);
    for (int k = 0; k < j; ++k) {
      auto lk = l.row(k);
      T s = g(j, k);
      for (int m = 0; m < k; ++m) s -= lj[m] * conj(lk[m]);
      lj[k] = s / lk[k];
    }
    real_t<T> d = real_part(g(j, j));
    for (int m = 0; m < j; ++m) d -= abs2(lj[m]);
    if (!(d > 0)) {
      throw NotPositiveDefinite("cholesky: nonpositive pivot " + std::to_string(double(d)) + " at row " +
                                std::to_string(j));
    }
    lj[j] = T(std::sqrt(d));
  }
  return l;
}

namespace {

template <Scalar T>
void check_diagonal(const DenseMatrix<T>& l) {
  for (int i = 0; i < l.rows(); ++i)
    if (l(i, i) == T(0)) throw SingularTriangular("triangular solve: zero diagonal at row " + std::to_string(i));
}

}  // namespace

template <Scalar T>
DenseMatrix<T> triangular_solve(const DenseMatrix<T>& l, const DenseMatrix<T>& m) {
  const int n = l.rows();
  if (l.cols() != n || m.rows() != n) throw SingularTriangular("triangular solve: dimension mismatch");
  check_diagonal(l);
  DenseMatrix<T> x = m;
  for (int i = 0; i < n; ++i) {
    auto xi = x.row(i);
    for (int k = 0; k < i; ++k) {
      const T lik = l(i, k);
      if (lik == T(0)) continue;
      auto xk = x.row(k);
      for (int j = 0; j < x.cols(); ++j) xi[j] -= lik * xk[j];
    }
    const T inv = T(1) / l(i, i);
    for (auto& v : xi) v *= inv;
  }
  return x;
}

template <Scalar T>
Vector<T> triangular_solve(const DenseMatrix<T>& l, const Vector<T>& b) {
  const int n = l.rows();
  if (l.cols() != n || int(b.size()) != n) throw SingularTriangular("triangular solve: dimension mismatch");
  check_diagonal(l);
  Vector<T> x = b;
  for (int i = 0; i < n; ++i) {
    auto li = l.row(i);
    T s = x[i];
    for (int k = 0; k < i; ++k) s -= li[k] * x[k];
    x[i] = s / li[i];
  }
  return x;
}

template <Scalar T>
Vector<T> triangular_adjoint_solve(const DenseMatrix<T>& l, const Vector<T>& b) {
  const int n = l.rows();
  if (l.cols() != n || int(b.size()) != n) throw SingularTriangular("triangular solve: dimension mismatch");
  check_diagonal(l);
  Vector<T> x = b;
  for (int i = n - 1; i >= 0; --i) {
    x[i] /= conj(l(i, i));
    const T xi = x[i];
    auto li = l.row(i);
    for (int k = 0; k < i; ++k) x[k] -= conj(li[k]) * xi;
  }
  return x;
}

template <Scalar T>
Vector<T> upper_solve(const DenseMatrix<T>& r, std::span<const T> b) {
  const int n = int(b.size());
  Vector<T> x(b.begin(), b.end());
  for (int i = n - 1; i >= 0; --i) {
    auto ri = r.row(i);
    T s = x[i];
    for (int k = i + 1; k < n; ++k) s -= ri[k] * x[k];
    if (ri[i] == T(0)) throw SingularTriangular("upper solve: zero diagonal at row " + std::to_string(i));
    x[i] = s / ri[i];
  }
  return x;
}

// ---------------------------------------------------------------------------
// Householder QR

namespace {

// Reflector H = I - tau v v* with v(0) = 1 and H* [alpha; x] = [beta; 0],
// beta = +||[alpha; x]||. Overwrites column k of `a` from row k downward.
template <Scalar T>
T make_reflector(DenseMatrix<T>& a, int k) {
  using R = real_t<T>;
  const int m = a.rows();
  const T alpha = a(k, k);
  R sigma(0);
  for (int i = k + 1; i < m; ++i) sigma += abs2(a(i, k));
  R alpha_imag(0);
  if constexpr (is_complex_v<T>) alpha_imag = alpha.imag();
  if (sigma == R(0) && alpha_imag == R(0) && real_part(alpha) >= R(0)) return T(0);

  const R beta = std::sqrt(abs2(alpha) + sigma);
  T alpha_minus_beta;
  if (real_part(alpha) > R(0)) {
    if constexpr (is_complex_v<T>) {
      alpha_minus_beta = T(-sigma, 2 * beta * alpha_imag) / (std::conj(alpha) + beta);
    } else {
      alpha_minus_beta = -sigma / (alpha + beta);
    }
  } else {
    alpha_minus_beta = alpha - beta;
  }
  const T tau = (T(beta) - alpha) / T(beta);
  const T scale = T(1) / alpha_minus_beta;
  for (int i = k + 1; i < m; ++i) a(i, k) *= scale;
  a(k, k) = T(beta);
  return tau;
}

// Applies (I - tau v v*)^* = I - conj(tau) v v* (adjoint) or the reflector
// itself to the columns [c0, c1) of `a`, with v stored in column k of `v`.
template <Scalar T>
void apply_reflector(const DenseMatrix<T>& v, int k, T tau, bool adjoint_op, DenseMatrix<T>& a, int c0, int c1) {
  if (tau == T(0)) return;
  const T t = adjoint_op ? conj(tau) : tau;
  const int m = a.rows();
  std::vector<T> w(c1 - c0, T(0));
  for (int j = c0; j < c1; ++j) w[j - c0] = a(k, j);
  for (int i = k + 1; i < m; ++i) {
    const T vi = conj(v(i, k));
    if (vi == T(0)) continue;
    auto ai = a.row(i);
    for (int j = c0; j < c1; ++j) w[j - c0] += vi * ai[j];
  }
  for (auto& x : w) x *= t;
  for (int j = c0; j < c1; ++j) a(k, j) -= w[j - c0];
  for (int i = k + 1; i < m; ++i) {
    const T vi = v(i, k);
    if (vi == T(0)) continue;
    auto ai = a.row(i);
    for (int j = c0; j < c1; ++j) ai[j] -= vi * w[j - c0];
  }
}

template <Scalar T>
void apply_reflector_vector(const DenseMatrix<T>& v, int k, T tau, bool adjoint_op, std::span<T> b) {
  if (tau == T(0)) return;
  const int m = v.rows();
  T w = b[k];
  for (int i = k + 1; i < m; ++i) w += conj(v(i, k)) * b[i];
  w *= adjoint_op ? conj(tau) : tau;
  b[k] -= w;
  for (int i = k + 1; i < m; ++i) b[i] -= v(i, k) * w;
}

}  // namespace

template <Scalar T>
QrFactors<T> householder_qr(const DenseMatrix<T>& m) {
  if (m.rows() < m.cols()) throw RankDeficient("householder_qr: fewer rows than columns");
  QrFactors<T> f{m, Vector<T>(m.cols(), T(0))};
  const int n = m.cols();
  for (int k = 0; k < n; ++k) {
    f.tau[k] = make_reflector(f.packed, k);
    apply_reflector(f.packed, k, f.tau[k], true, f.packed, k + 1, n);
  }
  return f;
}

template <Scalar T>
DenseMatrix<T> QrFactors<T>::r() const {
  const int n = cols();
  DenseMatrix<T> out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) out(i, j) = packed(i, j);
  return out;
}

template <Scalar T>
void QrFactors<T>::apply_qh(std::span<T> b) const {
  for (int k = 0; k < cols(); ++k) apply_reflector_vector(packed, k, tau[k], true, b);
}

template <Scalar T>
void QrFactors<T>::apply_q(std::span<T> b) const {
  for (int k = cols() - 1; k >= 0; --k) apply_reflector_vector(packed, k, tau[k], false, b);
}

template <Scalar T>
DenseMatrix<T> QrFactors<T>::apply_qh(const DenseMatrix<T>& m) const {
  DenseMatrix<T> out = m;
  for (int k = 0; k < cols(); ++k) apply_reflector(packed, k, tau[k], true, out, 0, out.cols());
  return out;
}

template <Scalar T>
DenseMatrix<T> QrFactors<T>::thin_q() const {
  DenseMatrix<T> q(rows(), cols());
  for (int j = 0; j < cols(); ++j) q(j, j) = T(1);
  for (int k = cols() - 1; k >= 0; --k) apply_reflector(packed, k, tau[k], false, q, 0, cols());
  return q;
}

template <Scalar T>
real_t<T> QrFactors<T>::max_diagonal() const {
  real_t<T> r(0);
  for (int i = 0; i < cols(); ++i) r = std::max(r, std::abs(packed(i, i)));
  return r;
}

template <Scalar T>
real_t<T> QrFactors<T>::min_diagonal() const {
  if (cols() == 0) return real_t<T>(0);
  real_t<T> r = std::abs(packed(0, 0));
  for (int i = 1; i < cols(); ++i) r = std::min(r, std::abs(packed(i, i)));
  return r;
}

template <Scalar T>
bool QrFactors<T>::rank_deficient() const {
  if (cols() == 0) return false;
  const real_t<T> top = max_diagonal();
  if (top == real_t<T>(0)) return true;
  return min_diagonal() < real_t<T>(rows()) * epsilon<T>() * top;
}

template <Scalar T>
Vector<T> least_squares_qr(const DenseMatrix<T>& m, const Vector<T>& b) {
  if (int(b.size()) != m.rows()) throw RankDeficient("least_squares_qr: dimension mismatch");
  const auto f = householder_qr(m);
  if (f.rank_deficient()) {
    throw RankDeficient("least_squares_qr: R diagonal " + std::to_string(double(f.min_diagonal())) +
                        " below threshold");
  }
  Vector<T> y = b;
  f.apply_qh(y);
  return upper_solve(f.packed, std::span<const T>(y.data(), std::size_t(m.cols())));
}

template <Scalar T>
Vector<T> solve_spd(const DenseMatrix<T>& a, const Vector<T>& f) {
  const auto l = cholesky(a);
  return triangular_adjoint_solve(l, triangular_solve(l, f));
}

// ---------------------------------------------------------------------------
// Condition numbers

template <Scalar T>
std::vector<double> hermitian_abs_eigenvalues(const DenseMatrix<T>& h) {
  const int n = h.rows();
  std::vector<double> w(n);
  if (n == 0) return w;
  lapack_int info = 0;
  if constexpr (is_complex_v<T>) {
    std::vector<std::complex<double>> a(std::size_t(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        a[std::size_t(i) * n + j] = 0.5 * (scalar_cast<std::complex<double>>(h(i, j)) +
                                           std::conj(scalar_cast<std::complex<double>>(h(j, i))));
    info = LAPACKE_zheevd(LAPACK_ROW_MAJOR, 'N', 'L', n, a.data(), n, w.data());
  } else {
    std::vector<double> a(std::size_t(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a[std::size_t(i) * n + j] = 0.5 * (double(h(i, j)) + double(h(j, i)));
    info = LAPACKE_dsyevd(LAPACK_ROW_MAJOR, 'N', 'L', n, a.data(), n, w.data());
  }
  if (info != 0) throw Error("eigenvalue solver failed with info " + std::to_string(info));
  for (auto& x : w) x = std::abs(x);
  std::sort(w.begin(), w.end(), std::greater<>());
  return w;
}

template <Scalar T>
double condition_number(const DenseMatrix<T>& m) {
  using D = promote_t<T>;
  const auto md = matrix_cast<D>(m);
  const double norm = frobenius_norm(md);
  if (m.empty() || norm == 0.0) throw ZeroMatrix("condition_number: zero matrix");

  std::vector<double> sigma;
  if (is_hermitian(md, 100.0 * double(epsilon<T>()) * norm)) {
    sigma = hermitian_abs_eigenvalues(md);
  } else {
    const auto gram = adjoint_multiply(md, md);
    sigma = hermitian_abs_eigenvalues(gram);
    for (auto& s : sigma) s = std::sqrt(s);
    // Squared singular values below eps * lambda_max are noise.
    const double dim = std::max(m.rows(), m.cols());
    const double cut = std::sqrt(dim * epsilon<double>()) * sigma.front();
    double smallest = sigma.front();
    for (double s : sigma)
      if (s > cut) smallest = s;
    return sigma.front() / smallest;
  }
  const double dim = std::max(m.rows(), m.cols());
  const double cut = dim * epsilon<double>() * sigma.front();
  double smallest = sigma.front();
  for (double s : sigma)
    if (s > cut) smallest = s;
  return sigma.front() / smallest;
}

// ---------------------------------------------------------------------------
// Saddle systems

template <Scalar T>
Vector<T> lu_solve(DenseMatrix<T> a, Vector<T> b) {
  using R = real_t<T>;
  const int n = a.rows();
  R scale(0);
  for (const T& x : a.data()) scale = std::max(scale, std::abs(x));
  const R tol = R(n) * epsilon<T>() * scale;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    R best = std::abs(a(k, k));
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > best) {
        best = std::abs(a(i, k));
        piv = i;
      }
    if (!(best > tol)) throw SingularSaddle("saddle system is singular at pivot " + std::to_string(k));
    if (piv != k) {
      std::swap_ranges(a.row(k).begin(), a.row(k).end(), a.row(piv).begin());
      std::swap(b[k], b[piv]);
    }
    const T inv = T(1) / a(k, k);
    auto ak = a.row(k);
    for (int i = k + 1; i < n; ++i) {
      const T factor = a(i, k) * inv;
      if (factor == T(0)) continue;
      auto ai = a.row(i);
      for (int j = k; j < n; ++j) ai[j] -= factor * ak[j];
      b[i] -= factor * b[k];
    }
  }
  return upper_solve(a, std::span<const T>(b));
}

template <Scalar T>
std::pair<Vector<T>, Vector<T>> saddle_solve(const DenseMatrix<T>& a, const DenseMatrix<T>& c,
                                              const Vector<T>& f, const Vector<T>& d) {
  const int n = a.rows();
  const int l = c.rows();
  if (l == 0) return {solve_spd(a, f), Vector<T>{}};
  if (c.cols() != n || int(f.size()) != n || int(d.size()) != l)
    throw SingularSaddle("saddle_solve: dimension mismatch");
  if (l > n) throw SingularSaddle("saddle_solve: more constraints than unknowns");
  if (householder_qr(adjoint(c)).rank_deficient()) throw SingularSaddle("saddle_solve: C is not of full row rank");

  DenseMatrix<T> k(n + l, n + l);
  Vector<T> rhs(n + l);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) k(i, j) = a(i, j);
    rhs[i] = f[i];
  }
  for (int i = 0; i < l; ++i) {
    for (int j = 0; j < n; ++j) {
      k(n + i, j) = c(i, j);
      k(j, n + i) = conj(c(i, j));
    }
    rhs[n + i] = d[i];
  }
  const auto x = lu_solve(std::move(k), std::move(rhs));
  return {Vector<T>(x.begin(), x.begin() + n), Vector<T>(x.begin() + n, x.end())};
}

#define DLS_INSTANTIATE(T)                                                                            \
  template DenseMatrix<T> cholesky(const DenseMatrix<T>&);                                            \
  template DenseMatrix<T> triangular_solve(const DenseMatrix<T>&, const DenseMatrix<T>&);             \
  template Vector<T> triangular_solve(const DenseMatrix<T>&, const Vector<T>&);                       \
  template Vector<T> triangular_adjoint_solve(const DenseMatrix<T>&, const Vector<T>&);               \
  template Vector<T> upper_solve(const DenseMatrix<T>&, std::span<const T>);                          \
  template struct QrFactors<T>;                                                                       \
  template QrFactors<T> householder_qr(const DenseMatrix<T>&);                                        \
  template Vector<T> least_squares_qr(const DenseMatrix<T>&, const Vector<T>&);                       \
  template Vector<T> solve_spd(const DenseMatrix<T>&, const Vector<T>&);                              \
  template std::vector<double> hermitian_abs_eigenvalues(const DenseMatrix<T>&);                      \
  template double condition_number(const DenseMatrix<T>&);                                            \
  template Vector<T> lu_solve(DenseMatrix<T>, Vector<T>);                                             \
  template std::pair<Vector<T>, Vector<T>> saddle_solve(const DenseMatrix<T>&, const DenseMatrix<T>&, \
                                                        const Vector<T>&, const Vector<T>&);

DLS_INSTANTIATE(float)
DLS_INSTANTIATE(double)
DLS_INSTANTIATE(std::complex<float>)
DLS_INSTANTIATE(std::complex<double>)

}  // namespace dls
