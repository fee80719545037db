#include "dls/basis.hpp"

#include <cmath>
#include <numbers>

#include "dls/errors.hpp"

namespace dls {

namespace {

// P_0..P_k and their derivatives at x.
void legendre_all(int k, double x, std::vector<double>& p, std::vector<double>& dp) {
  p.assign(k + 1, 0.0);
  dp.assign(k + 1, 0.0);
  p[0] = 1;
  if (k >= 1) {
    p[1] = x;
    dp[1] = 1;
  }
  for (int m = 1; m < k; ++m) {
    p[m + 1] = ((2 * m + 1) * x * p[m] - m * p[m - 1]) / (m + 1);
    dp[m + 1] = dp[m - 1] + (2 * m + 1) * p[m];
  }
}

struct WIndex {
  int a, b;
};

// W^p basis in local order: vertices, edges (bottom, right, top, left), interior.
std::vector<WIndex> w_indices(int p) {
  std::vector<WIndex> out = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  for (int k = 2; k <= p; ++k) out.push_back({k, 0});
  for (int k = 2; k <= p; ++k) out.push_back({1, k});
  for (int k = 2; k <= p; ++k) out.push_back({k, 1});
  for (int k = 2; k <= p; ++k) out.push_back({0, k});
  for (int a = 2; a <= p; ++a)
    for (int b = 2; b <= p; ++b) out.push_back({a, b});
  return out;
}

struct VIndex {
  bool x_component;  // x: h1_shape(a, xi) L(b, eta); y: L(a, xi) h1_shape(b, eta)
  int a, b;
  double sign;
};

// V^p basis: edge functions oriented outward (bottom, right, top, left), then interior.
std::vector<VIndex> v_indices(int p) {
  std::vector<VIndex> out;
  for (int j = 0; j < p; ++j) out.push_back({false, j, 0, -1.0});
  for (int j = 0; j < p; ++j) out.push_back({true, 1, j, 1.0});
  for (int j = 0; j < p; ++j) out.push_back({false, j, 1, 1.0});
  for (int j = 0; j < p; ++j) out.push_back({true, 0, j, -1.0});
  for (int a = 2; a <= p; ++a)
    for (int b = 0; b < p; ++b) out.push_back({true, a, b, 1.0});
  for (int a = 0; a < p; ++a)
    for (int b = 2; b <= p; ++b) out.push_back({false, a, b, 1.0});
  return out;
}

// Values and derivatives of both 1D families up to order p at t.
struct Family1D {
  std::vector<double> phi, dphi, leg, dleg;
};

Family1D family(int p, double t) {
  Family1D f;
  std::vector<double> pl, dpl;
  legendre_all(p, 2 * t - 1, pl, dpl);
  f.leg.resize(p + 1);
  f.dleg.resize(p + 1);
  for (int k = 0; k <= p; ++k) {
    const double s = std::sqrt(2.0 * k + 1);
    f.leg[k] = s * pl[k];
    f.dleg[k] = 2 * s * dpl[k];
  }
  f.phi.resize(p + 1);
  f.dphi.resize(p + 1);
  f.phi[0] = 1 - t;
  f.dphi[0] = -1;
  if (p >= 1) {
    f.phi[1] = t;
    f.dphi[1] = 1;
  }
  for (int k = 2; k <= p; ++k) {
    f.phi[k] = (pl[k] - pl[k - 2]) / (2 * std::sqrt(2.0 * k - 1));
    f.dphi[k] = f.leg[k - 1];
  }
  return f;
}

}  // namespace

int master_dimension(MasterSpace space, int p) {
  switch (space) {
    case MasterSpace::W: return (p + 1) * (p + 1);
    case MasterSpace::V: return 2 * p * (p + 1);
    case MasterSpace::Y: return p * p;
    case MasterSpace::trace_W: return 4 * p;
    case MasterSpace::trace_V: return 4 * p;
  }
  return 0;
}

double legendre(int k, double x) {
  std::vector<double> p, dp;
  legendre_all(k, x, p, dp);
  return p[k];
}

double orthonormal_legendre(int k, double t) { return std::sqrt(2.0 * k + 1) * legendre(k, 2 * t - 1); }

double orthonormal_legendre_derivative(int k, double t) {
  std::vector<double> p, dp;
  legendre_all(k, 2 * t - 1, p, dp);
  return 2 * std::sqrt(2.0 * k + 1) * dp[k];
}

double h1_shape(int k, double t) { return family(std::max(k, 1), t).phi[k]; }
double h1_shape_derivative(int k, double t) { return family(std::max(k, 1), t).dphi[k]; }

QuadratureRule gauss_rule(int q) {
  if (q < 1) throw UnsupportedOrder("gauss_rule: need at least one point");
  QuadratureRule rule;
  rule.points.resize(q);
  rule.weights.resize(q);
  std::vector<double> p, dp;
  for (int i = 0; i < (q + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    for (int it = 0; it < 100; ++it) {
      legendre_all(q, x, p, dp);
      const double dx = p[q] / dp[q];
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre_all(q, x, p, dp);
    const double w = 2 / ((1 - x * x) * dp[q] * dp[q]);
    // x is the i-th largest root; store ascending in t = (x + 1) / 2.
    rule.points[q - 1 - i] = (1 + x) / 2;
    rule.points[i] = (1 - x) / 2;
    rule.weights[q - 1 - i] = w / 2;
    rule.weights[i] = w / 2;
  }
  return rule;
}

TensorRule tensor_rule(int q) {
  const auto g = gauss_rule(q);
  TensorRule rule;
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) {
      rule.points.push_back({g.points[i], g.points[j]});
      rule.weights.push_back(g.weights[i] * g.weights[j]);
    }
  return rule;
}

Point edge_point(int e, double t) {
  switch (e) {
    case edge_bottom: return {t, 0};
    case edge_right: return {1, t};
    case edge_top: return {t, 1};
    default: return {0, t};
  }
}

Point edge_normal(int e) {
  switch (e) {
    case edge_bottom: return {0, -1};
    case edge_right: return {1, 0};
    case edge_top: return {0, 1};
    default: return {-1, 0};
  }
}

BasisTable eval_basis(MasterSpace space, int p, std::span<const Point> points) {
  if (p < 1) throw UnsupportedOrder("eval_basis: order must be at least 1");
  if (space == MasterSpace::trace_W || space == MasterSpace::trace_V)
    throw UnsupportedSpace("eval_basis: use eval_trace for trace spaces");
  BasisTable t;
  t.space = space;
  t.p = p;
  t.dim = master_dimension(space, p);
  t.npoints = int(points.size());
  const std::size_t size = std::size_t(t.dim) * t.npoints;
  t.value.assign(size, 0.0);
  if (space == MasterSpace::W) {
    t.grad_x.assign(size, 0.0);
    t.grad_y.assign(size, 0.0);
  }
  if (space == MasterSpace::V) {
    t.value_y.assign(size, 0.0);
    t.div.assign(size, 0.0);
  }
  const auto windex = w_indices(p);
  const auto vindex = v_indices(p);
  for (int k = 0; k < t.npoints; ++k) {
    const auto fx = family(p, points[k][0]);
    const auto fy = family(p, points[k][1]);
    switch (space) {
      case MasterSpace::W:
        for (int i = 0; i < t.dim; ++i) {
          const auto [a, b] = windex[i];
          const std::size_t at = std::size_t(i) * t.npoints + k;
          t.value[at] = fx.phi[a] * fy.phi[b];
          t.grad_x[at] = fx.dphi[a] * fy.phi[b];
          t.grad_y[at] = fx.phi[a] * fy.dphi[b];
        }
        break;
      case MasterSpace::V:
        for (int i = 0; i < t.dim; ++i) {
          const auto& v = vindex[i];
          const std::size_t at = std::size_t(i) * t.npoints + k;
          if (v.x_component) {
            t.value[at] = v.sign * fx.phi[v.a] * fy.leg[v.b];
            t.div[at] = v.sign * fx.dphi[v.a] * fy.leg[v.b];
          } else {
            t.value_y[at] = v.sign * fx.leg[v.a] * fy.phi[v.b];
            t.div[at] = v.sign * fx.leg[v.a] * fy.dphi[v.b];
          }
        }
        break;
      default:
        for (int a = 0; a < p; ++a)
          for (int b = 0; b < p; ++b) t.value[std::size_t(a * p + b) * t.npoints + k] = fx.leg[a] * fy.leg[b];
        break;
    }
  }
  return t;
}

BasisTable eval_trace(MasterSpace space, int p, int e, std::span<const double> ts) {
  if (p < 1) throw UnsupportedOrder("eval_trace: order must be at least 1");
  if (space != MasterSpace::trace_W && space != MasterSpace::trace_V)
    throw UnsupportedSpace("eval_trace: not a trace space");
  std::vector<Point> pts;
  for (double t : ts) pts.push_back(edge_point(e, t));
  BasisTable out;
  out.space = space;
  out.p = p;
  out.dim = master_dimension(space, p);
  out.npoints = int(pts.size());
  out.value.assign(std::size_t(out.dim) * out.npoints, 0.0);
  if (space == MasterSpace::trace_W) {
    const auto w = eval_basis(MasterSpace::W, p, pts);
    for (int i = 0; i < out.dim; ++i)
      for (int k = 0; k < out.npoints; ++k) out.value[std::size_t(i) * out.npoints + k] = w(i, k);
  } else {
    const auto v = eval_basis(MasterSpace::V, p, pts);
    const auto n = edge_normal(e);
    for (int i = 0; i < out.dim; ++i)
      for (int k = 0; k < out.npoints; ++k)
        out.value[std::size_t(i) * out.npoints + k] = v(i, k) * n[0] + v.vy(i, k) * n[1];
  }
  return out;
}

BasisTable pullback(const Element& element, const BasisTable& master) {
  BasisTable out = master;
  const double h = element.h;
  auto scale = [](std::vector<double>& v, double s) {
    for (auto& x : v) x *= s;
  };
  switch (master.space) {
    case MasterSpace::W:
      scale(out.grad_x, 1 / h);
      scale(out.grad_y, 1 / h);
      break;
    case MasterSpace::V:
      scale(out.value, 1 / h);
      scale(out.value_y, 1 / h);
      scale(out.div, 1 / (h * h));
      break;
    case MasterSpace::trace_V:
      scale(out.value, 1 / h);
      break;
    default:
      break;
  }
  return out;
}

}  // namespace dls
