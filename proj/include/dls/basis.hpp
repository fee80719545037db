#pragma once

#include <array>
#include <span>
#include <vector>

#include "dls/mesh.hpp"

namespace dls {

/// Master-square spaces of the exact sequence W^p -> V^p -> Y^p on (0,1)^2,
/// plus the traces of W^p and normal traces of V^p on the element boundary.
enum class MasterSpace { W, V, Y, trace_W, trace_V };

int master_dimension(MasterSpace space, int p);

// 1D families on [0,1].
double legendre(int k, double x);             // P_k on [-1,1]
double orthonormal_legendre(int k, double t);  // sqrt(2k+1) P_k(2t-1)
double orthonormal_legendre_derivative(int k, double t);
double h1_shape(int k, double t);  // 1-t, t, then integrated Legendre
double h1_shape_derivative(int k, double t);

/// 1D Gauss-Legendre rule with q points on [0,1].
struct QuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;
  int size() const { return int(points.size()); }
};

QuadratureRule gauss_rule(int q);

/// Tensor rule on (0,1)^2; point k = (points[k/q], points[k%q]).
struct TensorRule {
  std::vector<std::array<double, 2>> points;
  std::vector<double> weights;
  int size() const { return int(points.size()); }
};

TensorRule tensor_rule(int q);

using Point = std::array<double, 2>;

/// Point of local edge e at parameter t; t runs along +x or +y.
Point edge_point(int e, double t);
/// Outward unit normal of local edge e on the master square.
Point edge_normal(int e);

/// dim x npoints tables, entry (i, k) at i * npoints + k.
struct BasisTable {
  MasterSpace space = MasterSpace::W;
  int p = 1;
  int dim = 0;
  int npoints = 0;
  std::vector<double> value;    // scalar value, x-component for V, trace value for traces
  std::vector<double> value_y;  // V only
  std::vector<double> grad_x, grad_y;  // W only
  std::vector<double> div;             // V only

  double operator()(int i, int k) const { return value[std::size_t(i) * npoints + k]; }
  double vy(int i, int k) const { return value_y[std::size_t(i) * npoints + k]; }
  double gx(int i, int k) const { return grad_x[std::size_t(i) * npoints + k]; }
  double gy(int i, int k) const { return grad_y[std::size_t(i) * npoints + k]; }
  double dv(int i, int k) const { return div[std::size_t(i) * npoints + k]; }
};

/// Evaluates W, V or Y at master points.
BasisTable eval_basis(MasterSpace space, int p, std::span<const Point> points);

/// Evaluates a trace space (trace_W, trace_V) on local edge e at parameters t.
/// trace_V returns the outward normal component. Functions not associated
/// with edge e vanish there (except the W vertex functions at its endpoints).
BasisTable eval_trace(MasterSpace space, int p, int e, std::span<const double> t);

/// Maps master tables to the physical square of side h: gradients / h,
/// H(div) values / h, divergences / h^2, normal traces / h.
BasisTable pullback(const Element& element, const BasisTable& master);

}  // namespace dls
