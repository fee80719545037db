#include <doctest.h>

#include <complex>

#include "dls/element.hpp"
#include "dls/errors.hpp"
#include "oracles.hpp"

using namespace dls;
using cd = std::complex<double>;
using cf = std::complex<float>;

namespace {

template <class T>
double rel(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
  return double(frobenius_norm(subtract(a, b))) / double(frobenius_norm(b));
}

template <class T>
double rel(const Vector<T>& a, const Vector<T>& b) {
  return double(norm2(subtract(a, b))) / double(norm2(b));
}

template <class T>
Vector<T> concat_by(const std::vector<int>& idx_a, const Vector<T>& a, const std::vector<int>& idx_b,
                    const Vector<T>& b) {
  Vector<T> out(idx_a.size() + idx_b.size());
  for (std::size_t k = 0; k < idx_a.size(); ++k) out[idx_a[k]] = a[k];
  for (std::size_t k = 0; k < idx_b.size(); ++k) out[idx_b[k]] = b[k];
  return out;
}

std::vector<char> random_mask(int n, int count, std::mt19937_64& gen) {
  std::vector<char> m(n, 0);
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), gen);
  for (int k = 0; k < count; ++k) m[idx[k]] = 1;
  return m;
}

}  // namespace

TEST_CASE_TEMPLATE("whitening identity", T, double, cd) {
  auto& gen = oracle::rng();
  for (int trial = 0; trial < 10; ++trial) {
    ElementSystem<T> s;
    s.g = oracle::random_spd<T>(12, gen);
    s.b = oracle::random_matrix<T>(12, 7, gen);
    s.l = oracle::random_vector<T>(12, gen);
    whiten(s);
    // B* G^-1 B, G^-1 applied column by column.
    DenseMatrix<T> ginv_b(12, 7);
    for (int j = 0; j < 7; ++j) {
      const auto x = solve_spd(s.g, s.b.column(j));
      for (int i = 0; i < 12; ++i) ginv_b(i, j) = x[i];
    }
    CHECK(rel(adjoint_multiply(s.bt, s.bt), adjoint_multiply(s.b, ginv_b)) <= 1e-12);
    CHECK(rel(adjoint_multiply(s.bt, s.lt), adjoint_multiply(ginv_b, s.l)) <= 1e-12);
  }
}

TEST_CASE("whitening examples") {
  ElementSystem<double> s;
  s.g = DenseMatrix<double>::identity(3);
  s.b = oracle::random_matrix<double>(3, 2);
  s.l = {1, 2, 3};
  whiten(s);
  CHECK(s.bt.data() == s.b.data());
  CHECK(s.lt == s.l);

  ElementSystem<double> d;
  d.g = DenseMatrix<double>(1, 1, {4});
  d.b = DenseMatrix<double>(1, 2, {2, 6});
  d.l = {8};
  whiten(d);
  CHECK(d.bt(0, 0) == 1);
  CHECK(d.bt(0, 1) == 3);
  CHECK(d.lt[0] == 4);

  ElementSystem<double> bad;
  bad.g = DenseMatrix<double>(2, 2, {0, 0, 0, 1});
  bad.b = DenseMatrix<double>(2, 1);
  bad.l = {0, 0};
  CHECK_THROWS_AS(whiten(bad), NotPositiveDefinite);
}

TEST_CASE("Gram preconditioning") {
  SUBCASE("unit diagonal unchanged") {
    auto g = DenseMatrix<double>(2, 2, {1, 0.5, 0.5, 1});
    auto b = oracle::random_matrix<double>(2, 3);
    Vector<double> l = {1, 2};
    const auto g0 = g, b0 = b;
    precondition_gram(g, b, l);
    CHECK(g.data() == g0.data());
    CHECK(b.data() == b0.data());
  }
  SUBCASE("diag(4, 9)") {
    DenseMatrix<double> g(2, 2, {4, 0, 0, 9});
    DenseMatrix<double> b(2, 1, {2, 3});
    Vector<double> l = {4, 9};
    precondition_gram(g, b, l);
    CHECK(g(0, 0) == 1);
    CHECK(g(1, 1) == 1);
    CHECK(b(0, 0) == doctest::Approx(1.0));
    CHECK(b(1, 0) == doctest::Approx(1.0));
    CHECK(l[0] == doctest::Approx(2.0));
    CHECK(l[1] == doctest::Approx(3.0));
  }
  SUBCASE("nonpositive diagonal") {
    DenseMatrix<double> g(2, 2, {1, 0, 0, -1});
    DenseMatrix<double> b(2, 1);
    Vector<double> l(2);
    CHECK_THROWS_AS(precondition_gram(g, b, l), NonpositiveDiagonal);
  }
}

TEST_CASE_TEMPLATE("Gram preconditioning leaves the minimizer unchanged", T, double, cd) {
  auto& gen = oracle::rng();
  for (int trial = 0; trial < 10; ++trial) {
    ElementSystem<T> s;
    s.g = oracle::random_spd<T>(10, gen);
    for (int i = 0; i < 10; ++i)  // spread the diagonal over several decades
      for (int j = 0; j < 10; ++j) s.g(i, j) *= T(std::pow(10.0, 0.3 * (i + j)));
    s.b = oracle::random_matrix<T>(10, 4, gen);
    s.l = oracle::random_vector<T>(10, gen);
    auto scaled = s;
    whiten(s);
    const auto u0 = least_squares_qr(s.bt, s.lt);
    precondition_gram(scaled.g, scaled.b, scaled.l);
    for (int i = 0; i < 10; ++i) CHECK(std::abs(scaled.g(i, i) - T(1)) == 0.0);
    whiten(scaled);
    const auto u1 = least_squares_qr(scaled.bt, scaled.lt);
    CHECK(rel(u1, u0) <= 1e-12);
  }
}

TEST_CASE_TEMPLATE("element normal equation", T, double, cd) {
  auto& gen = oracle::rng();
  // Orthonormal columns give the identity.
  const auto q = householder_qr(oracle::random_matrix<T>(9, 4, gen)).thin_q();
  auto [a, f] = element_ne(q, Vector<T>(9, T(0)));
  CHECK(rel(a, DenseMatrix<T>::identity(4)) <= 1e-14);
  CHECK(norm2(f) == 0.0);

  const auto bt = oracle::random_matrix<T>(12, 5, gen);
  auto [a2, f2] = element_ne(bt, oracle::random_vector<T>(12, gen));
  CHECK(is_hermitian(a2, 0.0));
  const auto ev = hermitian_abs_eigenvalues(a2);
  const auto sv = oracle::singular_values(bt);
  for (int i = 0; i < 5; ++i) CHECK(ev[i] == doctest::Approx(sv[i] * sv[i]).epsilon(1e-12));
}

TEST_CASE_TEMPLATE("Dirichlet elimination", T, double, cd) {
  auto& gen = oracle::rng();
  const int m = 14, n = 8;
  const auto bt = oracle::random_matrix<T>(m, n, gen);
  const auto lt = oracle::random_vector<T>(m, gen);
  std::vector<char> fixed = {1, 0, 0, 1, 0, 1, 0, 0};

  SUBCASE("homogeneous lift") {
    auto [b, l] = apply_dirichlet(bt, lt, fixed, std::span<const T>(Vector<T>(n, T(0))));
    CHECK(b.cols() == 5);
    CHECK(b.rows() == m);
    CHECK(l == lt);
    CHECK(b(3, 0) == bt(3, 1));
    CHECK(b(3, 4) == bt(3, 7));
  }
  SUBCASE("all fixed") {
    std::vector<char> all(n, 1);
    const auto lift = oracle::random_vector<T>(n, gen);
    auto [b, l] = apply_dirichlet(bt, lt, all, std::span<const T>(lift));
    CHECK(b.cols() == 0);
    CHECK(norm2(l) == doctest::Approx(double(norm2(subtract(lt, multiply(bt, lift))))));
  }
  SUBCASE("random lift equals the constrained saddle solve") {
    Vector<T> lift(n, T(0));
    for (int j = 0; j < n; ++j)
      if (fixed[j]) lift[j] = oracle::random_scalar<T>(gen);
    auto [b, l] = apply_dirichlet(bt, lt, fixed, std::span<const T>(lift));
    const auto u_hom = least_squares_qr(b, l);
    Vector<T> u(n);
    for (int j = 0, k = 0; j < n; ++j) u[j] = fixed[j] ? lift[j] : u_hom[k++];

    std::vector<int> rows;
    for (int j = 0; j < n; ++j)
      if (fixed[j]) rows.push_back(j);
    DenseMatrix<T> c(int(rows.size()), n);
    Vector<T> d(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      c(int(r), rows[r]) = T(1);
      d[r] = lift[rows[r]];
    }
    auto [a, f] = element_ne(bt, lt);
    const auto [us, w] = saddle_solve(a, c, f, d);
    CHECK(rel(u, us) <= 1e-12);

    // The square variant solves the same problem.
    auto [af, ff] = apply_dirichlet_square(a, f, fixed, std::span<const T>(lift));
    const auto u_sq = solve_spd(af, ff);
    CHECK(rel(u_sq, u_hom) <= 1e-12);
  }
}

TEST_CASE_TEMPLATE("LS condensation", T, double, cd) {
  auto& gen = oracle::rng();
  SUBCASE("no bubbles is the identity") {
    const auto bt = oracle::random_matrix<T>(8, 4, gen);
    const auto lt = oracle::random_vector<T>(8, gen);
    const auto c = condense_ls(bt, lt, std::vector<char>(4, 0));
    CHECK(c.matrix.data() == bt.data());
    CHECK(c.rhs == lt);
    CHECK(recover_bubbles(c, lt).empty());
  }
  SUBCASE("interface orthogonal to the bubbles is unchanged") {
    const auto q = householder_qr(oracle::random_matrix<T>(10, 5, gen)).thin_q();
    // Columns 0,1 bubbles; 2..4 orthogonal to them.
    const auto c = condense_ls(q, Vector<T>(10, T(1)), std::vector<char>{1, 1, 0, 0, 0});
    CHECK(rel(c.matrix, select_columns(q, std::vector<int>{2, 3, 4})) <= 1e-14);
  }
  SUBCASE("random partitions") {
    for (int trial = 0; trial < 20; ++trial) {
      const int m = 20, n = 9;
      const auto bt = oracle::random_matrix<T>(m, n, gen);
      const auto lt = oracle::random_vector<T>(m, gen);
      const auto mask = random_mask(n, 1 + trial % 6, gen);
      const auto c = condense_ls(bt, lt, mask);
      const auto u_full = least_squares_qr(bt, lt);
      const auto u_i = least_squares_qr(c.matrix, c.rhs);
      const auto u_b = recover_bubbles(c, u_i);
      CHECK(rel(concat_by(c.interface, u_i, c.bubble, u_b), u_full) <= 1e-11);

      // Projector algebra with P = Q_b Q_b*.
      const auto qb = c.bubble_qr.thin_q();
      const auto p = multiply(qb, adjoint(qb));
      CHECK(rel(multiply(p, p), p) <= 1e-12);
      CHECK(rel(adjoint(p), p) <= 1e-14);
      // (I - P) from the full QR of the bubble block equals the complement projector.
      const auto qfull = adjoint(c.bubble_qr.apply_qh(DenseMatrix<T>::identity(m)));
      std::vector<int> rest;
      for (int k = int(c.bubble.size()); k < m; ++k) rest.push_back(k);
      const auto qi = select_columns(qfull, rest);
      auto ip = DenseMatrix<T>::identity(m);
      ip = subtract(ip, p);
      CHECK(double(frobenius_norm(subtract(multiply(qi, adjoint(qi)), ip))) <= 1e-12);

      // Recovery at interface values making the residual orthogonal to the bubbles gives zero bubbles.
      Vector<T> shifted = multiply(select_columns(bt, c.interface), u_i);
      const auto c0 = condense_ls(bt, shifted, mask);
      const auto zero = recover_bubbles(c0, u_i);
      CHECK(double(norm2(zero)) <= 1e-12);
    }
  }
  SUBCASE("zero data gives zero bubbles") {
    const auto bt = oracle::random_matrix<T>(10, 5, gen);
    const auto c = condense_ls(bt, Vector<T>(10, T(0)), std::vector<char>{1, 0, 1, 0, 0});
    CHECK(norm2(recover_bubbles(c, Vector<T>(3, T(0)))) == 0.0);
  }
  SUBCASE("rank-deficient bubble block") {
    auto bt = oracle::random_matrix<T>(10, 4, gen);
    for (int i = 0; i < 10; ++i) bt(i, 1) = T(2) * bt(i, 0);
    CHECK_THROWS_AS(condense_ls(bt, Vector<T>(10, T(0)), std::vector<char>{1, 1, 0, 0}), RankDeficientBubbles);
  }
}

TEST_CASE_TEMPLATE("NE condensation", T, double, cd) {
  auto& gen = oracle::rng();
  SUBCASE("scalar Schur complement") {
    DenseMatrix<T> a(2, 2, {T(2), T(1), T(1), T(2)});
    const auto c = condense_ne(a, Vector<T>{T(1), T(1)}, std::vector<char>{1, 0});
    CHECK(std::abs(c.matrix(0, 0) - T(1.5)) <= 1e-15);
    CHECK(std::abs(c.rhs[0] - T(0.5)) <= 1e-15);
  }
  SUBCASE("block diagonal") {
    DenseMatrix<T> a(3, 3);
    a(0, 0) = T(3);
    a(1, 1) = T(2);
    a(2, 2) = T(5);
    a(1, 2) = a(2, 1) = T(1);
    const auto c = condense_ne(a, Vector<T>(3, T(1)), std::vector<char>{1, 0, 0});
    CHECK(rel(c.matrix, select_block(a, std::vector<int>{1, 2}, std::vector<int>{1, 2})) == 0.0);
  }
  SUBCASE("singular bubble block") {
    DenseMatrix<T> a(2, 2, {T(0), T(0), T(0), T(1)});
    CHECK_THROWS_AS(condense_ne(a, Vector<T>(2, T(0)), std::vector<char>{1, 0}), SingularBubbleBlock);
  }
  SUBCASE("Schur equals the normal equation of the projected rows") {
    for (int trial = 0; trial < 20; ++trial) {
      const int m = 18, n = 8;
      const auto bt = oracle::random_matrix<T>(m, n, gen);
      const auto lt = oracle::random_vector<T>(m, gen);
      const auto mask = random_mask(n, 1 + trial % 5, gen);
      const auto ls = condense_ls(bt, lt, mask);
      auto [a, f] = element_ne(bt, lt);
      const auto ne = condense_ne(a, f, mask);
      const auto [a_ls, f_ls] = element_ne(ls.matrix, ls.rhs);
      CHECK(rel(ne.matrix, a_ls) <= 1e-11);
      CHECK(rel(ne.rhs, f_ls) <= 1e-11);
      // The projected interface rows times the unprojected interface columns also give Schur.
      CHECK(rel(adjoint_multiply(ls.bt_interface, ls.matrix), a_ls) <= 1e-11);

      const auto u_full = least_squares_qr(bt, lt);
      const auto u_i = solve_spd(ne.matrix, ne.rhs);
      const auto u_b = recover_bubbles(ne, u_i);
      CHECK(rel(concat_by(ne.interface, u_i, ne.bubble, u_b), u_full) <= 1e-11);
    }
  }
}

TEST_CASE_TEMPLATE("condensation in single precision stays close", T, float, cf) {
  auto& gen = oracle::rng();
  const auto bt = oracle::random_matrix<T>(16, 6, gen);
  const auto lt = oracle::random_vector<T>(16, gen);
  const std::vector<char> mask = {1, 0, 1, 0, 0, 1};
  const auto c = condense_ls(bt, lt, mask);
  const auto u_i = least_squares_qr(c.matrix, c.rhs);
  const auto u = concat_by(c.interface, u_i, c.bubble, recover_bubbles(c, u_i));
  CHECK(rel(u, least_squares_qr(bt, lt)) <= 1e-4);
}

TEST_CASE("element pipeline on real formulations") {
  const auto mesh = uniform_mesh(2);
  const auto data = make_case("poisson-sine");
  for (const auto& name : {"fosls-strong", "primal-dpg", "ultraweak-dpg"})
    for (int p : {1, 2}) {
      const auto form = make_formulation(name, p, 1);
      auto s = compute_element<double>(form, mesh.elements[3], data);
      auto pre = s;
      precondition_gram(pre.g, pre.b, pre.l);
      whiten(s);
      whiten(pre);
      // Preconditioning changes the rows but not the normal matrix.
      CHECK(rel(adjoint_multiply(pre.bt, pre.bt), adjoint_multiply(s.bt, s.bt)) <= 1e-12);
    }
  const auto fosls = compute_element<double>(make_formulation("fosls-strong", 1, 1), Element{}, data);
  double dmax = 0;
  for (int i = 0; i < fosls.g.rows(); ++i) dmax = std::max(dmax, fosls.g(i, i));
  for (int i = 0; i < fosls.g.rows(); ++i)
    for (int j = 0; j < fosls.g.cols(); ++j)
      if (i != j) CHECK(std::abs(fosls.g(i, j)) <= 1e-13 * dmax);
}
