#include "dls/discretization.hpp"

#include <cmath>

#include "dls/basis.hpp"
#include "dls/errors.hpp"
#include "dls/linalg.hpp"

namespace dls {

int Discretization::fixed_count() const {
  int n = 0;
  for (char f : fixed) n += f;
  return n;
}

Discretization discretize(int n, const Formulation& form) {
  Discretization d;
  d.mesh = uniform_mesh(n);
  d.form = form;
  d.offsets = {0};
  for (const auto& c : form.trial) {
    auto [layout, con] = build_layout(d.mesh, c.kind, c.p);
    if (layout.local_size != master_dimension(c.master, c.p))
      throw UnsupportedSpace("component " + c.name + " does not match its master space");
    d.offsets.push_back(d.offsets.back() + layout.size);
    d.local_bubble.insert(d.local_bubble.end(), layout.local_bubble.begin(), layout.local_bubble.end());
    d.layouts.push_back(std::move(layout));
    d.connectivity.push_back(std::move(con));
  }
  d.size = d.offsets.back();
  d.fixed.assign(d.size, 0);
  for (std::size_t ci = 0; ci < form.trial.size(); ++ci)
    if (form.trial[ci].dirichlet)
      for (int g : d.layouts[ci].boundary) d.fixed[d.offsets[ci] + g] = 1;

  d.dofs.resize(d.mesh.elements.size());
  for (std::size_t k = 0; k < d.mesh.elements.size(); ++k)
    for (std::size_t ci = 0; ci < form.trial.size(); ++ci)
      for (const auto& dof : d.connectivity[ci][int(k)])
        d.dofs[k].push_back({d.offsets[ci] + dof.global, dof.sign});
  return d;
}

namespace {

Point physical(const Element& el, const Point& xi) { return {el.x0 + el.h * xi[0], el.y0 + el.h * xi[1]}; }

// Solves the (real, SPD) mass system restricted to `idx` against `rhs`.
Vector<cdouble> mass_solve(const DenseMatrix<cdouble>& mass, const Vector<cdouble>& rhs) {
  return solve_spd(mass, rhs);
}

cdouble exact_scalar(const ManufacturedCase& data, FieldKind field, double x, double y) {
  switch (field) {
    case FieldKind::vector_x: return data.sigma(x, y)[0];
    case FieldKind::vector_y: return data.sigma(x, y)[1];
    default: return data.u(x, y);
  }
}

// Local coefficients (master orientation) of a W or trace_W component.
Vector<cdouble> interpolate_h1(const Element& el, MasterSpace space, int p, const ManufacturedCase& data) {
  const int dim = master_dimension(space, p);
  Vector<cdouble> loc(dim, 0.0);
  const std::array<Point, 4> corners = {Point{0, 0}, Point{1, 0}, Point{1, 1}, Point{0, 1}};
  for (int v = 0; v < 4; ++v) {
    const auto x = physical(el, corners[v]);
    loc[v] = data.u(x[0], x[1]);
  }
  if (p < 2) return loc;
  const auto rule = gauss_rule(p + 6);
  for (int e = 0; e < 4; ++e) {
    std::vector<Point> pts;
    for (double t : rule.points) pts.push_back(edge_point(e, t));
    const auto w = eval_basis(MasterSpace::W, p, pts);
    const int first = 4 + e * (p - 1);
    DenseMatrix<cdouble> mass(p - 1, p - 1);
    Vector<cdouble> rhs(p - 1, 0.0);
    for (int k = 0; k < rule.size(); ++k) {
      const auto x = physical(el, pts[k]);
      cdouble r = data.u(x[0], x[1]);
      for (int v = 0; v < 4; ++v) r -= loc[v] * w(v, k);
      for (int a = 0; a < p - 1; ++a) {
        rhs[a] += rule.weights[k] * r * w(first + a, k);
        for (int b = 0; b < p - 1; ++b) mass(a, b) += rule.weights[k] * w(first + a, k) * w(first + b, k);
      }
    }
    const auto c = mass_solve(mass, rhs);
    for (int a = 0; a < p - 1; ++a) loc[first + a] = c[a];
  }
  if (space == MasterSpace::trace_W) return loc;

  const int nb = 4 * p;
  const int ni = dim - nb;
  const auto rule2 = tensor_rule(p + 6);
  const auto w = eval_basis(MasterSpace::W, p, rule2.points);
  DenseMatrix<cdouble> mass(ni, ni);
  Vector<cdouble> rhs(ni, 0.0);
  for (int k = 0; k < rule2.size(); ++k) {
    const auto x = physical(el, rule2.points[k]);
    cdouble r = data.u(x[0], x[1]);
    for (int i = 0; i < nb; ++i) r -= loc[i] * w(i, k);
    for (int a = 0; a < ni; ++a) {
      rhs[a] += rule2.weights[k] * r * w(nb + a, k);
      for (int b = 0; b < ni; ++b) mass(a, b) += rule2.weights[k] * w(nb + a, k) * w(nb + b, k);
    }
  }
  const auto c = mass_solve(mass, rhs);
  for (int a = 0; a < ni; ++a) loc[nb + a] = c[a];
  return loc;
}

// Local coefficients of a V or trace_V component: normal moments on edges
// (in the element's outward orientation), then the interior projection.
Vector<cdouble> interpolate_hdiv(const Element& el, MasterSpace space, int p, const ManufacturedCase& data) {
  const int dim = master_dimension(space, p);
  Vector<cdouble> loc(dim, 0.0);
  const auto rule = gauss_rule(p + 6);
  for (int e = 0; e < 4; ++e) {
    const auto n = edge_normal(e);
    for (int j = 0; j < p; ++j) {
      cdouble c = 0;
      for (int k = 0; k < rule.size(); ++k) {
        const auto x = physical(el, edge_point(e, rule.points[k]));
        const auto s = data.sigma(x[0], x[1]);
        c += rule.weights[k] * (s[0] * n[0] + s[1] * n[1]) * orthonormal_legendre(j, rule.points[k]);
      }
      loc[e * p + j] = el.h * c;
    }
  }
  if (space == MasterSpace::trace_V || p < 2) return loc;

  const int nb = 4 * p;
  const int ni = dim - nb;
  const auto rule2 = tensor_rule(p + 6);
  const auto v = pullback(el, eval_basis(MasterSpace::V, p, rule2.points));
  DenseMatrix<cdouble> mass(ni, ni);
  Vector<cdouble> rhs(ni, 0.0);
  for (int k = 0; k < rule2.size(); ++k) {
    const auto x = physical(el, rule2.points[k]);
    auto s = data.sigma(x[0], x[1]);
    for (int i = 0; i < nb; ++i) {
      s[0] -= loc[i] * v(i, k);
      s[1] -= loc[i] * v.vy(i, k);
    }
    for (int a = 0; a < ni; ++a) {
      rhs[a] += rule2.weights[k] * (s[0] * v(nb + a, k) + s[1] * v.vy(nb + a, k));
      for (int b = 0; b < ni; ++b)
        mass(a, b) += rule2.weights[k] * (v(nb + a, k) * v(nb + b, k) + v.vy(nb + a, k) * v.vy(nb + b, k));
    }
  }
  const auto c = mass_solve(mass, rhs);
  for (int a = 0; a < ni; ++a) loc[nb + a] = c[a];
  return loc;
}

Vector<cdouble> interpolate_l2(const Element& el, int p, FieldKind field, const ManufacturedCase& data) {
  const auto rule = tensor_rule(p + 6);
  const auto y = eval_basis(MasterSpace::Y, p, rule.points);
  Vector<cdouble> loc(y.dim, 0.0);
  for (int k = 0; k < rule.size(); ++k) {
    const auto x = physical(el, rule.points[k]);
    const cdouble f = exact_scalar(data, field, x[0], x[1]);
    for (int i = 0; i < y.dim; ++i) loc[i] += rule.weights[k] * f * y(i, k);
  }
  return loc;
}

}  // namespace

Vector<cdouble> interpolate(const Discretization& disc, const ManufacturedCase& data) {
  Vector<cdouble> u(disc.size, 0.0);
  const auto local_offsets = disc.form.trial_offsets();
  for (const auto& el : disc.mesh.elements) {
    for (std::size_t ci = 0; ci < disc.form.trial.size(); ++ci) {
      const auto& c = disc.form.trial[ci];
      Vector<cdouble> loc;
      switch (c.master) {
        case MasterSpace::W:
        case MasterSpace::trace_W: loc = interpolate_h1(el, c.master, c.p, data); break;
        case MasterSpace::V:
        case MasterSpace::trace_V: loc = interpolate_hdiv(el, c.master, c.p, data); break;
        case MasterSpace::Y: loc = interpolate_l2(el, c.p, c.field, data); break;
      }
      for (std::size_t i = 0; i < loc.size(); ++i) {
        const auto& dof = disc.dofs[el.id][local_offsets[ci] + i];
        u[dof.global] = double(dof.sign) * loc[i];
      }
    }
  }
  return u;
}

Vector<cdouble> default_lift(const Discretization& disc, const ManufacturedCase& data) {
  auto u = interpolate(disc, data);
  for (int g = 0; g < disc.size; ++g)
    if (!disc.fixed[g]) u[g] = 0;
  return u;
}

double ErrorNorms::l2() const { return std::hypot(l2_scalar, l2_vector); }

double ErrorNorms::relative_l2() const { return l2() / exact_l2; }

double ErrorNorms::u_norm() const {
  return std::sqrt(l2_scalar * l2_scalar + l2_vector * l2_vector + grad_scalar * grad_scalar +
                   div_vector * div_vector);
}

ErrorNorms error_norms(const Discretization& disc, std::span<const cdouble> coefficients,
                       const ManufacturedCase* exact) {
  const auto& form = disc.form;
  const int q = form.quadrature_points() + 2;
  const auto rule = tensor_rule(q);
  const int nq = rule.size();
  const auto local_offsets = form.trial_offsets();

  bool has_scalar = false, has_vector = false, has_grad = false, has_div = false;
  for (const auto& c : form.trial) {
    if (c.master == MasterSpace::W) has_scalar = has_grad = true;
    if (c.master == MasterSpace::V) has_vector = has_div = true;
    if (c.master == MasterSpace::Y) (c.field == FieldKind::scalar ? has_scalar : has_vector) = true;
  }

  double e_s = 0, e_v = 0, e_g = 0, e_d = 0, x_l2 = 0, x_extra = 0;
  for (const auto& el : disc.mesh.elements) {
    std::vector<cdouble> s(nq), vx(nq), vy(nq), gx(nq), gy(nq), dv(nq);
    for (std::size_t ci = 0; ci < form.trial.size(); ++ci) {
      const auto& c = form.trial[ci];
      if (c.master == MasterSpace::trace_W || c.master == MasterSpace::trace_V) continue;
      const auto t = pullback(el, eval_basis(c.master, c.p, rule.points));
      for (int i = 0; i < t.dim; ++i) {
        const auto& dof = disc.dofs[el.id][local_offsets[ci] + i];
        const cdouble a = double(dof.sign) * coefficients[dof.global];
        if (a == 0.0) continue;
        for (int k = 0; k < nq; ++k) {
          switch (c.master) {
            case MasterSpace::W:
              s[k] += a * t(i, k);
              gx[k] += a * t.gx(i, k);
              gy[k] += a * t.gy(i, k);
              break;
            case MasterSpace::V:
              vx[k] += a * t(i, k);
              vy[k] += a * t.vy(i, k);
              dv[k] += a * t.dv(i, k);
              break;
            default:
              (c.field == FieldKind::vector_x ? vx : c.field == FieldKind::vector_y ? vy : s)[k] += a * t(i, k);
              break;
          }
        }
      }
    }
    for (int k = 0; k < nq; ++k) {
      const double w = rule.weights[k] * el.h * el.h;
      const auto x = physical(el, rule.points[k]);
      cdouble u = 0, d = 0;
      std::array<cdouble, 2> g{}, sig{};
      if (exact) {
        u = exact->u(x[0], x[1]);
        g = exact->grad_u(x[0], x[1]);
        sig = exact->sigma(x[0], x[1]);
        d = exact->div_sigma(x[0], x[1]);
      }
      if (has_scalar) {
        e_s += w * std::norm(u - s[k]);
        x_l2 += w * std::norm(u);
      }
      if (has_vector) {
        e_v += w * (std::norm(sig[0] - vx[k]) + std::norm(sig[1] - vy[k]));
        x_l2 += w * (std::norm(sig[0]) + std::norm(sig[1]));
      }
      if (has_grad) {
        e_g += w * (std::norm(g[0] - gx[k]) + std::norm(g[1] - gy[k]));
        x_extra += w * (std::norm(g[0]) + std::norm(g[1]));
      }
      if (has_div) {
        e_d += w * std::norm(d - dv[k]);
        x_extra += w * std::norm(d);
      }
    }
  }
  ErrorNorms out;
  out.l2_scalar = std::sqrt(e_s);
  out.l2_vector = std::sqrt(e_v);
  out.grad_scalar = std::sqrt(e_g);
  out.div_vector = std::sqrt(e_d);
  out.exact_l2 = std::sqrt(x_l2);
  out.exact_u = std::sqrt(x_l2 + x_extra);
  return out;
}

}  // namespace dls
