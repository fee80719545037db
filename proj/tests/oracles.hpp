#pragma once

// Independent reference computations used only by the tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "dls/dense.hpp"
#include "dls/linalg.hpp"

namespace oracle {

using dls::DenseMatrix;

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240611);
  return gen;
}

template <class T>
T random_scalar(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  if constexpr (dls::is_complex_v<T>) {
    using R = dls::real_t<T>;
    return T(R(dist(gen)), R(dist(gen)));
  } else {
    return T(dist(gen));
  }
}

template <class T>
DenseMatrix<T> random_matrix(int rows, int cols, std::mt19937_64& gen = rng()) {
  DenseMatrix<T> m(rows, cols);
  for (auto& x : m.data()) x = random_scalar<T>(gen);
  return m;
}

template <class T>
std::vector<T> random_vector(int n, std::mt19937_64& gen = rng()) {
  std::vector<T> v(n);
  for (auto& x : v) x = random_scalar<T>(gen);
  return v;
}

/// Random Hermitian positive definite matrix LL* + n I.
template <class T>
DenseMatrix<T> random_spd(int n, std::mt19937_64& gen = rng()) {
  auto m = random_matrix<T>(n, n, gen);
  auto g = dls::multiply(m, dls::adjoint(m));
  for (int i = 0; i < n; ++i) g(i, i) += T(n);
  return g;
}

/// Eigenvalues of a real symmetric or complex Hermitian matrix by cyclic
/// Jacobi rotations in double precision. Slow, simple, accurate.
inline std::vector<double> jacobi_eigenvalues(const DenseMatrix<std::complex<double>>& h) {
  const int n = h.rows();
  // Embed the Hermitian n x n matrix as a real symmetric 2n x 2n one:
  // [Re -Im; Im Re] has every eigenvalue of h twice.
  const int m = 2 * n;
  std::vector<double> a(std::size_t(m) * m);
  auto at = [&](int i, int j) -> double& { return a[std::size_t(i) * m + j]; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      at(i, j) = h(i, j).real();
      at(i + n, j + n) = h(i, j).real();
      at(i, j + n) = -h(i, j).imag();
      at(i + n, j) = h(i, j).imag();
    }
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if (i != j) off += at(i, j) * at(i, j);
    if (off < 1e-30) break;
    for (int p = 0; p < m; ++p)
      for (int q = p + 1; q < m; ++q) {
        if (std::abs(at(p, q)) < 1e-300) continue;
        const double theta = (at(q, q) - at(p, p)) / (2 * at(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1);
        const double s = t * c;
        for (int k = 0; k < m; ++k) {
          const double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < m; ++k) {
          const double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(m);
  for (int i = 0; i < m; ++i) ev[i] = at(i, i);
  std::sort(ev.begin(), ev.end());
  std::vector<double> out;
  for (int i = 0; i < m; i += 2) out.push_back(ev[i]);
  return out;
}

/// Singular values (descending) of m via Jacobi on m*m.
template <class T>
std::vector<double> singular_values(const DenseMatrix<T>& m) {
  const auto md = dls::matrix_cast<std::complex<double>>(m);
  auto ev = jacobi_eigenvalues(dls::adjoint_multiply(md, md));
  std::vector<double> s;
  for (double e : ev) s.push_back(std::sqrt(std::max(e, 0.0)));
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

/// Exact integral of x^a over [0,1].
inline double monomial(int a) { return 1.0 / (a + 1); }

/// Polynomial in (x, y) with per-direction degree <= d, stored as c[a*(d+1)+b]
/// for x^a y^b. Fitted from samples, then multiplied and integrated exactly.
struct Poly2 {
  int d = 0;
  std::vector<double> c;

  template <class F>
  static Poly2 fit(int degree, F&& f) {
    Poly2 out{degree, std::vector<double>(std::size_t(degree + 1) * (degree + 1), 0.0)};
    const int m = 2 * degree + 3;
    const int nc = (degree + 1) * (degree + 1);
    DenseMatrix<double> a(m * m, nc);
    std::vector<double> rhs(m * m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const double x = (i + 0.5) / m, y = (j + 0.5) / m;
        const int r = i * m + j;
        for (int p = 0; p <= degree; ++p)
          for (int q = 0; q <= degree; ++q) a(r, p * (degree + 1) + q) = std::pow(x, p) * std::pow(y, q);
        rhs[r] = f(x, y);
      }
    out.c = dls::least_squares_qr(a, rhs);
    return out;
  }

  /// Exact integral of this * other over [0,1]^2.
  double integrate_product(const Poly2& o) const {
    double s = 0;
    for (int a = 0; a <= d; ++a)
      for (int b = 0; b <= d; ++b) {
        const double ca = c[a * (d + 1) + b];
        if (ca == 0) continue;
        for (int p = 0; p <= o.d; ++p)
          for (int q = 0; q <= o.d; ++q) s += ca * o.c[p * (o.d + 1) + q] * monomial(a + p) * monomial(b + q);
      }
    return s;
  }

  Poly2 operator-(const Poly2& o) const {
    const int dd = std::max(d, o.d);
    Poly2 out{dd, std::vector<double>(std::size_t(dd + 1) * (dd + 1), 0.0)};
    for (int a = 0; a <= d; ++a)
      for (int b = 0; b <= d; ++b) out.c[a * (dd + 1) + b] += c[a * (d + 1) + b];
    for (int a = 0; a <= o.d; ++a)
      for (int b = 0; b <= o.d; ++b) out.c[a * (dd + 1) + b] -= o.c[a * (o.d + 1) + b];
    return out;
  }
};

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = int(x.size());
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < n; ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

}  // namespace oracle
