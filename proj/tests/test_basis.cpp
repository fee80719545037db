#include <doctest.h>

#include <cmath>
#include <random>

#include "dls/basis.hpp"
#include "dls/linalg.hpp"
#include "oracles.hpp"

using namespace dls;

namespace {

std::vector<Point> random_points(int count, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> pts(count);
  for (auto& p : pts) p = {u(gen), u(gen)};
  return pts;
}

// Residual of fitting `values` (npoints) in the span of the rows of `basis`.
double fit_residual(const std::vector<std::vector<double>>& basis, const std::vector<double>& values) {
  const int m = int(values.size());
  const int n = int(basis.size());
  DenseMatrix<double> a(m, n);
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < n; ++j) a(k, j) = basis[j][k];
  const auto x = least_squares_qr(a, values);
  return norm2(subtract(multiply(a, x), values));
}

}  // namespace

TEST_CASE("gauss rules") {
  auto g1 = gauss_rule(1);
  CHECK(g1.points[0] == doctest::Approx(0.5));
  CHECK(g1.weights[0] == doctest::Approx(1.0));

  auto g2 = gauss_rule(2);
  double s = 0;
  for (int k = 0; k < 2; ++k) s += g2.weights[k] * g2.points[k] * g2.points[k];
  CHECK(s == doctest::Approx(1.0 / 3).epsilon(1e-15));

  auto t5 = tensor_rule(5);
  double s86 = 0;
  for (int k = 0; k < t5.size(); ++k) s86 += t5.weights[k] * std::pow(t5.points[k][0], 8) * std::pow(t5.points[k][1], 6);
  CHECK(std::abs(s86 - 1.0 / 63) <= 1e-15);

  CHECK_THROWS_AS(gauss_rule(0), UnsupportedOrder);

  for (int q = 1; q <= 12; ++q) {
    auto g = gauss_rule(q);
    double total = 0;
    for (double w : g.weights) {
      CHECK(w > 0);
      total += w;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    for (int a = 0; a <= 2 * q - 1; ++a) {
      double integral = 0;
      for (int k = 0; k < q; ++k) integral += g.weights[k] * std::pow(g.points[k], a);
      CHECK(integral == doctest::Approx(oracle::monomial(a)).epsilon(1e-14));
    }
    for (int k = 1; k < q; ++k) CHECK(g.points[k] > g.points[k - 1]);
  }
}

TEST_CASE("master dimensions") {
  for (int p = 1; p <= 4; ++p) {
    std::vector<Point> pt = {{0.3, 0.7}};
    CHECK(eval_basis(MasterSpace::W, p, pt).dim == (p + 1) * (p + 1));
    CHECK(eval_basis(MasterSpace::V, p, pt).dim == 2 * p * (p + 1));
    CHECK(eval_basis(MasterSpace::Y, p, pt).dim == p * p);
    std::vector<double> t = {0.2};
    CHECK(eval_trace(MasterSpace::trace_W, p, 0, t).dim == 4 * p);
    CHECK(eval_trace(MasterSpace::trace_V, p, 0, t).dim == 4 * p);
  }
  std::vector<Point> pt = {{0.3, 0.7}};
  CHECK_THROWS_AS(eval_basis(MasterSpace::W, 0, pt), UnsupportedOrder);
}

TEST_CASE("W1 vertex functions") {
  std::vector<Point> corners = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  auto w = eval_basis(MasterSpace::W, 1, corners);
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) CHECK(w(i, k) == (i == k ? 1.0 : 0.0));
  auto tables = eval_basis(MasterSpace::W, 3, corners);
  // Higher-order functions vanish at every vertex.
  for (int i = 4; i < tables.dim; ++i)
    for (int k = 0; k < 4; ++k) CHECK(std::abs(tables(i, k)) < 1e-15);
}

TEST_CASE("Y is orthonormal") {
  for (int p = 1; p <= 4; ++p) {
    auto rule = tensor_rule(p + 2);
    auto y = eval_basis(MasterSpace::Y, p, rule.points);
    for (int i = 0; i < y.dim; ++i)
      for (int j = 0; j < y.dim; ++j) {
        double s = 0;
        for (int k = 0; k < rule.size(); ++k) s += rule.weights[k] * y(i, k) * y(j, k);
        CHECK(std::abs(s - (i == j ? 1.0 : 0.0)) <= 1e-13);
      }
  }
}

TEST_CASE("exact sequence: div V in span Y") {
  std::mt19937_64 gen(11);
  for (int p = 1; p <= 4; ++p) {
    auto pts = random_points(25, gen);
    auto v = eval_basis(MasterSpace::V, p, pts);
    auto y = eval_basis(MasterSpace::Y, p, pts);
    std::vector<std::vector<double>> ybasis(y.dim, std::vector<double>(pts.size()));
    for (int i = 0; i < y.dim; ++i)
      for (int k = 0; k < y.npoints; ++k) ybasis[i][k] = y(i, k);
    for (int i = 0; i < v.dim; ++i) {
      std::vector<double> d(pts.size());
      for (int k = 0; k < v.npoints; ++k) d[k] = v.dv(i, k);
      CHECK(fit_residual(ybasis, d) <= 1e-12);
    }
  }
}

TEST_CASE("gradients and divergences match finite differences") {
  std::mt19937_64 gen(5);
  const double eps = 1e-6;
  for (int p = 1; p <= 4; ++p) {
    auto pts = random_points(6, gen);
    for (auto& pt : pts) pt = {0.1 + 0.8 * pt[0], 0.1 + 0.8 * pt[1]};
    std::vector<Point> px, mx, py, my;
    for (auto pt : pts) {
      px.push_back({pt[0] + eps, pt[1]});
      mx.push_back({pt[0] - eps, pt[1]});
      py.push_back({pt[0], pt[1] + eps});
      my.push_back({pt[0], pt[1] - eps});
    }
    auto w = eval_basis(MasterSpace::W, p, pts);
    auto wpx = eval_basis(MasterSpace::W, p, px), wmx = eval_basis(MasterSpace::W, p, mx);
    auto wpy = eval_basis(MasterSpace::W, p, py), wmy = eval_basis(MasterSpace::W, p, my);
    auto v = eval_basis(MasterSpace::V, p, pts);
    auto vpx = eval_basis(MasterSpace::V, p, px), vmx = eval_basis(MasterSpace::V, p, mx);
    auto vpy = eval_basis(MasterSpace::V, p, py), vmy = eval_basis(MasterSpace::V, p, my);
    for (int k = 0; k < int(pts.size()); ++k) {
      for (int i = 0; i < w.dim; ++i) {
        CHECK(w.gx(i, k) == doctest::Approx((wpx(i, k) - wmx(i, k)) / (2 * eps)).epsilon(1e-6));
        CHECK(w.gy(i, k) == doctest::Approx((wpy(i, k) - wmy(i, k)) / (2 * eps)).epsilon(1e-6));
      }
      for (int i = 0; i < v.dim; ++i) {
        const double fd = (vpx(i, k) - vmx(i, k)) / (2 * eps) + (vpy.vy(i, k) - vmy.vy(i, k)) / (2 * eps);
        CHECK(v.dv(i, k) == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("edge traces") {
  const auto g = gauss_rule(8);
  for (int p = 1; p <= 4; ++p)
    for (int e = 0; e < 4; ++e) {
      // Normal traces: exactly the p functions of edge e are nonzero, each L_j(t).
      auto tv = eval_trace(MasterSpace::trace_V, p, e, g.points);
      std::vector<std::vector<double>> poly_pm1;
      for (int a = 0; a < p; ++a) {
        std::vector<double> m;
        for (double t : g.points) m.push_back(std::pow(t, a));
        poly_pm1.push_back(m);
      }
      for (int i = 0; i < tv.dim; ++i) {
        std::vector<double> vals(g.points.size());
        double size = 0;
        for (int k = 0; k < tv.npoints; ++k) {
          vals[k] = tv(i, k);
          size += std::abs(vals[k]);
        }
        if (i / p == e) {
          for (int k = 0; k < tv.npoints; ++k)
            CHECK(tv(i, k) == doctest::Approx(orthonormal_legendre(i % p, g.points[k])).epsilon(1e-13));
          CHECK(fit_residual(poly_pm1, vals) <= 1e-12);
        } else {
          CHECK(size <= 1e-14);
        }
      }
      // Traces of W span polynomials of degree p on the edge.
      auto tw = eval_trace(MasterSpace::trace_W, p, e, g.points);
      std::vector<std::vector<double>> poly_p = poly_pm1;
      std::vector<double> top;
      for (double t : g.points) top.push_back(std::pow(t, p));
      poly_p.push_back(top);
      std::vector<std::vector<double>> active;
      for (int i = 0; i < tw.dim; ++i) {
        std::vector<double> vals(g.points.size());
        for (int k = 0; k < tw.npoints; ++k) vals[k] = tw(i, k);
        CHECK(fit_residual(poly_p, vals) <= 1e-12);
        if (norm2(vals) > 1e-14) active.push_back(vals);
      }
      CHECK(int(active.size()) == p + 1);
      for (auto& mono : poly_p) CHECK(fit_residual(active, mono) <= 1e-12);
    }
}

TEST_CASE("pullback") {
  std::vector<Point> pts = {{0.25, 0.5}, {0.9, 0.1}};
  Element unit;
  auto w = eval_basis(MasterSpace::W, 2, pts);
  auto v = eval_basis(MasterSpace::V, 2, pts);
  auto pw = pullback(unit, w);
  auto pv = pullback(unit, v);
  CHECK(pw.grad_x == w.grad_x);
  CHECK(pv.value == v.value);
  CHECK(pv.div == v.div);

  auto mesh = uniform_mesh(2);
  auto half = pullback(mesh.elements[3], w);
  for (std::size_t k = 0; k < w.grad_x.size(); ++k) {
    CHECK(half.grad_x[k] == doctest::Approx(2 * w.grad_x[k]));
    CHECK(half.value[k] == w.value[k]);
  }
}

TEST_CASE("divergence theorem on a physical element") {
  auto mesh = uniform_mesh(3);
  const auto& el = mesh.elements[4];
  std::mt19937_64 gen(9);
  const int p = 2;
  auto coeff = oracle::random_vector<double>(master_dimension(MasterSpace::V, p), gen);
  const auto rule = tensor_rule(6);
  auto v = pullback(el, eval_basis(MasterSpace::V, p, rule.points));
  double volume = 0;
  for (int k = 0; k < rule.size(); ++k) {
    double d = 0;
    for (int i = 0; i < v.dim; ++i) d += coeff[i] * v.dv(i, k);
    volume += rule.weights[k] * el.h * el.h * d;
  }
  const auto g = gauss_rule(6);
  double boundary = 0;
  for (int e = 0; e < 4; ++e) {
    std::vector<Point> pts;
    for (double t : g.points) pts.push_back(edge_point(e, t));
    auto ve = pullback(el, eval_basis(MasterSpace::V, p, pts));
    const auto n = edge_normal(e);
    for (int k = 0; k < g.size(); ++k) {
      double flux = 0;
      for (int i = 0; i < ve.dim; ++i) flux += coeff[i] * (ve(i, k) * n[0] + ve.vy(i, k) * n[1]);
      boundary += g.weights[k] * el.h * flux;
    }
  }
  CHECK(std::abs(volume - boundary) <= 1e-13);
}
