#include "dls/formulation.hpp"

#include <cmath>

#include "dls/errors.hpp"

namespace dls {

namespace {

constexpr double pi = std::numbers::pi;

FormulationKind parse_kind(std::string_view name) {
  if (name == "fosls-strong") return FormulationKind::fosls_strong;
  if (name == "primal-dpg") return FormulationKind::primal_dpg;
  if (name == "ultraweak-dpg") return FormulationKind::ultraweak_dpg;
  if (name == "bubnov-galerkin") return FormulationKind::bubnov_galerkin;
  if (name == "acoustics-ultraweak") return FormulationKind::acoustics_ultraweak;
  throw UnsupportedCombination("unknown formulation '" + std::string(name) + "'");
}

}  // namespace

int Formulation::trial_dim() const { return trial_offsets().back(); }

int Formulation::test_dim() const {
  int n = 0;
  for (const auto& t : test) n += master_dimension(t.space, t.p);
  return n;
}

std::vector<int> Formulation::trial_offsets() const {
  std::vector<int> off = {0};
  for (const auto& c : trial) off.push_back(off.back() + master_dimension(c.master, c.p));
  return off;
}

std::vector<std::string> formulation_names() {
  return {"fosls-strong", "primal-dpg", "ultraweak-dpg", "bubnov-galerkin", "acoustics-ultraweak"};
}

Formulation make_formulation(std::string_view name, int p, int dp, FormulationParameters params) {
  if (p < 1) throw UnsupportedCombination("formulation order p must be at least 1");
  if (dp < 0) throw UnsupportedCombination("test enrichment dp must be nonnegative");
  Formulation f;
  f.kind = parse_kind(name);
  f.name = std::string(name);
  f.p = p;
  f.dp = dp;
  f.params = params;
  const int r = p + dp;
  if (params.alpha && f.kind != FormulationKind::fosls_strong)
    throw UnsupportedCombination("a reaction coefficient is only supported by fosls-strong");

  switch (f.kind) {
    case FormulationKind::fosls_strong:
      f.trial = {{"u", SpaceKind::h1_conforming, MasterSpace::W, p, FieldKind::scalar, true},
                 {"sigma", SpaceKind::hdiv_conforming, MasterSpace::V, p, FieldKind::vector, false}};
      f.test = {{"v", MasterSpace::Y, r}, {"tau_x", MasterSpace::Y, r, FieldKind::vector_x},
                {"tau_y", MasterSpace::Y, r, FieldKind::vector_y}};
      break;
    case FormulationKind::primal_dpg:
      f.trial = {{"u", SpaceKind::h1_conforming, MasterSpace::W, p, FieldKind::scalar, true},
                 {"sigma_n", SpaceKind::trace_h_minus_half, MasterSpace::trace_V, p, FieldKind::vector, false}};
      f.test = {{"v", MasterSpace::W, r}};
      break;
    case FormulationKind::ultraweak_dpg:
      f.trial = {{"u", SpaceKind::l2_broken, MasterSpace::Y, p, FieldKind::scalar, false},
                 {"sigma_x", SpaceKind::l2_broken, MasterSpace::Y, p, FieldKind::vector_x, false},
                 {"sigma_y", SpaceKind::l2_broken, MasterSpace::Y, p, FieldKind::vector_y, false},
                 {"u_hat", SpaceKind::trace_h_half, MasterSpace::trace_W, p, FieldKind::scalar, true},
                 {"sigma_n", SpaceKind::trace_h_minus_half, MasterSpace::trace_V, p, FieldKind::vector, false}};
      f.test = {{"v", MasterSpace::W, r}, {"tau", MasterSpace::V, r}};
      break;
    case FormulationKind::bubnov_galerkin:
      f.dp = 0;
      f.direct = true;
      f.trial = {{"u", SpaceKind::h1_conforming, MasterSpace::W, p, FieldKind::scalar, true}};
      f.test = {{"v", MasterSpace::W, p}};
      break;
    case FormulationKind::acoustics_ultraweak:
      f.complex_field = true;
      f.trial = {{"p", SpaceKind::l2_broken, MasterSpace::Y, p, FieldKind::scalar, false},
                 {"u_x", SpaceKind::l2_broken, MasterSpace::Y, p, FieldKind::vector_x, false},
                 {"u_y", SpaceKind::l2_broken, MasterSpace::Y, p, FieldKind::vector_y, false},
                 {"p_hat", SpaceKind::trace_h_half, MasterSpace::trace_W, p, FieldKind::scalar, false},
                 {"u_n", SpaceKind::trace_h_minus_half, MasterSpace::trace_V, p, FieldKind::vector, true}};
      f.test = {{"q", MasterSpace::W, r}, {"v", MasterSpace::V, r}};
      break;
  }
  return f;
}

Formulation make_fosls_reference(int p, FormulationParameters params, int quadrature_dp) {
  Formulation f = make_formulation("fosls-strong", p, quadrature_dp, std::move(params));
  f.name = "fosls-reference";
  f.direct = true;
  f.test.clear();
  return f;
}

// ---------------------------------------------------------------------------
// Manufactured solutions

std::vector<std::string> case_names() {
  return {"poisson-sine", "poisson-sine10", "poisson-quartic", "poisson-alpha-sine", "acoustics-resonance"};
}

namespace {

ManufacturedCase sine_case(std::string name, double k) {
  ManufacturedCase c;
  c.name = std::move(name);
  c.u = [k](double x, double y) { return cdouble(std::sin(k * x) * std::sin(k * y)); };
  c.grad_u = [k](double x, double y) {
    return std::array<cdouble, 2>{k * std::cos(k * x) * std::sin(k * y), k * std::sin(k * x) * std::cos(k * y)};
  };
  c.sigma = c.grad_u;
  c.div_sigma = [k](double x, double y) { return cdouble(-2 * k * k * std::sin(k * x) * std::sin(k * y)); };
  c.f = [k](double x, double y) { return cdouble(2 * k * k * std::sin(k * x) * std::sin(k * y)); };
  return c;
}

}  // namespace

ManufacturedCase make_case(std::string_view name, double omega) {
  if (name == "poisson-sine") return sine_case("poisson-sine", pi);
  if (name == "poisson-sine10") return sine_case("poisson-sine10", 10 * pi);
  if (name == "poisson-alpha-sine") {
    ManufacturedCase c = sine_case("poisson-alpha-sine", pi);
    c.alpha = [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); };
    c.f = [](double x, double y) {
      const double s = std::sin(pi * x) * std::sin(pi * y);
      return cdouble(2 * pi * pi * s + s * s);
    };
    return c;
  }
  if (name == "poisson-quartic") {
    auto g = [](double t) { return t * t * (1 - t) * (1 - t); };
    auto dg = [](double t) { return 2 * t * (1 - t) * (1 - 2 * t); };
    auto d2g = [](double t) { return 2 - 12 * t + 12 * t * t; };
    ManufacturedCase c;
    c.name = "poisson-quartic";
    c.u = [=](double x, double y) { return cdouble(g(x) * g(y)); };
    c.grad_u = [=](double x, double y) { return std::array<cdouble, 2>{dg(x) * g(y), g(x) * dg(y)}; };
    c.sigma = c.grad_u;
    c.div_sigma = [=](double x, double y) { return cdouble(d2g(x) * g(y) + g(x) * d2g(y)); };
    c.f = [=](double x, double y) { return cdouble(-(d2g(x) * g(y) + g(x) * d2g(y))); };
    return c;
  }
  if (name == "acoustics-resonance") {
    ManufacturedCase c;
    c.name = "acoustics-resonance";
    c.complex_field = true;
    c.omega = omega;
    const cdouble iw(0, omega);
    c.u = [](double x, double y) { return cdouble(std::cos(pi * x) * std::cos(pi * y)); };
    c.grad_u = [](double x, double y) {
      return std::array<cdouble, 2>{-pi * std::sin(pi * x) * std::cos(pi * y), -pi * std::cos(pi * x) * std::sin(pi * y)};
    };
    c.sigma = [iw](double x, double y) {
      return std::array<cdouble, 2>{pi / iw * std::sin(pi * x) * std::cos(pi * y),
                                    pi / iw * std::cos(pi * x) * std::sin(pi * y)};
    };
    c.div_sigma = [iw](double x, double y) { return 2 * pi * pi / iw * std::cos(pi * x) * std::cos(pi * y); };
    c.f = [omega](double x, double y) {
      return cdouble(0, omega - 2 * pi * pi / omega) * std::cos(pi * x) * std::cos(pi * y);
    };
    return c;
  }
  throw UnknownCase("unknown manufactured case '" + std::string(name) + "'");
}

FormulationParameters parameters_for(const ManufacturedCase& c) {
  FormulationParameters params;
  params.alpha = c.alpha;
  if (c.complex_field) params.omega = c.omega;
  return params;
}

// ---------------------------------------------------------------------------
// Element integrals

namespace {

// Physical values of one basis function at one point. Unused slots stay zero.
struct FieldValue {
  double s = 0, vx = 0, vy = 0, gx = 0, gy = 0, dv = 0;
};

// Volume values of all functions of a list of spaces, function-major.
struct VolumeTable {
  int dim = 0;
  int npoints = 0;
  std::vector<FieldValue> values;
  const FieldValue& operator()(int i, int k) const { return values[std::size_t(i) * npoints + k]; }
};

void append_volume(VolumeTable& table, const Element& el, MasterSpace space, int p, FieldKind field,
                   std::span<const Point> points) {
  const int np = int(points.size());
  const int dim = master_dimension(space, p);
  table.npoints = np;
  const std::size_t start = table.values.size();
  table.values.resize(start + std::size_t(dim) * np);
  table.dim += dim;
  if (space == MasterSpace::trace_W || space == MasterSpace::trace_V) return;
  const auto t = pullback(el, eval_basis(space, p, points));
  for (int i = 0; i < dim; ++i)
    for (int k = 0; k < np; ++k) {
      auto& v = table.values[start + std::size_t(i) * np + k];
      switch (space) {
        case MasterSpace::W:
          v.s = t(i, k);
          v.gx = t.gx(i, k);
          v.gy = t.gy(i, k);
          break;
        case MasterSpace::V:
          v.vx = t(i, k);
          v.vy = t.vy(i, k);
          v.dv = t.dv(i, k);
          break;
        default:
          if (field == FieldKind::vector_x) v.vx = t(i, k);
          else if (field == FieldKind::vector_y) v.vy = t(i, k);
          else v.s = t(i, k);
          break;
      }
    }
}

// Edge values on local edge e: trace values for trial traces; value and
// outward normal component for test functions.
struct EdgeValue {
  double trace_flux = 0;   // normal trace of a trace_V function
  double trace_value = 0;  // value of a trace_W function
  double s = 0;            // test W value
  double vn = 0;           // test V normal component
};

struct EdgeTable {
  int npoints = 0;
  std::vector<EdgeValue> values;
  const EdgeValue& operator()(int i, int k) const { return values[std::size_t(i) * npoints + k]; }
};

void append_edge(EdgeTable& table, const Element& el, MasterSpace space, int p, int e, std::span<const double> ts) {
  const int np = int(ts.size());
  const int dim = master_dimension(space, p);
  table.npoints = np;
  const std::size_t start = table.values.size();
  table.values.resize(start + std::size_t(dim) * np);
  std::vector<Point> pts;
  for (double t : ts) pts.push_back(edge_point(e, t));
  const auto n = edge_normal(e);
  switch (space) {
    case MasterSpace::trace_V: {
      const auto t = pullback(el, eval_trace(space, p, e, ts));
      for (int i = 0; i < dim; ++i)
        for (int k = 0; k < np; ++k) table.values[start + std::size_t(i) * np + k].trace_flux = t(i, k);
      break;
    }
    case MasterSpace::trace_W: {
      const auto t = eval_trace(space, p, e, ts);
      for (int i = 0; i < dim; ++i)
        for (int k = 0; k < np; ++k) table.values[start + std::size_t(i) * np + k].trace_value = t(i, k);
      break;
    }
    case MasterSpace::W: {
      const auto t = eval_basis(space, p, pts);
      for (int i = 0; i < dim; ++i)
        for (int k = 0; k < np; ++k) table.values[start + std::size_t(i) * np + k].s = t(i, k);
      break;
    }
    case MasterSpace::V: {
      const auto t = pullback(el, eval_basis(space, p, pts));
      for (int i = 0; i < dim; ++i)
        for (int k = 0; k < np; ++k)
          table.values[start + std::size_t(i) * np + k].vn = t(i, k) * n[0] + t.vy(i, k) * n[1];
      break;
    }
    default:
      break;  // Y test functions never meet the skeleton
  }
}

template <class D>
D from_complex(cdouble z) {
  if constexpr (is_complex_v<D>) return z;
  else return z.real();
}

}  // namespace

template <class D>
ElementMatrices<D> eval_forms(const Formulation& form, const Element& el, const ManufacturedCase& data) {
  if (form.complex_field && !is_complex_v<D>)
    throw UnsupportedCombination(form.name + " requires a complex scalar field");
  const int q = form.quadrature_points();
  const auto rule = tensor_rule(q);
  const auto edge_rule = gauss_rule(q);
  const double h = el.h;
  const int nq = rule.size();

  VolumeTable trial, test;
  for (const auto& c : form.trial) append_volume(trial, el, c.master, c.p, c.field, rule.points);
  const int nt = trial.dim;

  std::vector<double> w(nq), alpha(nq, 0.0);
  std::vector<D> load(nq);
  for (int k = 0; k < nq; ++k) {
    const double x = el.x0 + h * rule.points[k][0];
    const double y = el.y0 + h * rule.points[k][1];
    w[k] = rule.weights[k] * h * h;
    if (form.params.alpha) alpha[k] = form.params.alpha(x, y);
    load[k] = from_complex<D>(data.f(x, y));
  }

  ElementMatrices<D> out;
  if (form.direct) {
    out.a = DenseMatrix<D>(nt, nt);
    out.f = Vector<D>(nt, D(0));
    const bool fosls = form.kind == FormulationKind::fosls_strong;
    for (int k = 0; k < nq; ++k) {
      for (int i = 0; i < nt; ++i) {
        const auto& a = trial(i, k);
        const double ri = -a.dv + alpha[k] * a.s;
        if (fosls) out.f[i] += w[k] * load[k] * ri;
        else out.f[i] += w[k] * load[k] * a.s;
        for (int j = 0; j < nt; ++j) {
          const auto& b = trial(j, k);
          double v;
          if (fosls) {
            v = ri * (-b.dv + alpha[k] * b.s) + (a.vx - a.gx) * (b.vx - b.gx) + (a.vy - a.gy) * (b.vy - b.gy);
          } else {
            v = a.gx * b.gx + a.gy * b.gy;
          }
          out.a(i, j) += w[k] * v;
        }
      }
    }
    return out;
  }

  for (const auto& c : form.test) append_volume(test, el, c.space, c.p, c.field, rule.points);
  const int ns = test.dim;
  out.g = DenseMatrix<D>(ns, ns);
  out.b = DenseMatrix<D>(ns, nt);
  out.l = Vector<D>(ns, D(0));

  D iw(0);
  if constexpr (is_complex_v<D>) iw = D(0, form.params.omega);

  for (int k = 0; k < nq; ++k) {
    for (int i = 0; i < ns; ++i) {
      const auto& v = test(i, k);
      out.l[i] += w[k] * load[k] * v.s;
      auto gi = out.g.row(i);
      for (int j = 0; j < ns; ++j) {
        const auto& u = test(j, k);
        gi[j] += w[k] * (v.s * u.s + v.gx * u.gx + v.gy * u.gy + v.vx * u.vx + v.vy * u.vy + v.dv * u.dv);
      }
      auto bi = out.b.row(i);
      for (int j = 0; j < nt; ++j) {
        const auto& u = trial(j, k);
        D val(0);
        switch (form.kind) {
          case FormulationKind::fosls_strong:
            val = (-u.dv + alpha[k] * u.s) * v.s + (u.vx - u.gx) * v.vx + (u.vy - u.gy) * v.vy;
            break;
          case FormulationKind::primal_dpg:
            val = u.gx * v.gx + u.gy * v.gy;
            break;
          case FormulationKind::ultraweak_dpg:
            val = u.vx * (v.gx + v.vx) + u.vy * (v.gy + v.vy) + u.s * v.dv;
            break;
          case FormulationKind::acoustics_ultraweak:
            val = iw * (u.s * v.s + u.vx * v.vx + u.vy * v.vy) - (u.vx * v.gx + u.vy * v.gy) - u.s * v.dv;
            break;
          case FormulationKind::bubnov_galerkin:
            break;
        }
        bi[j] += w[k] * val;
      }
    }
  }

  // Skeleton pairings <trace, test> over the four edges of the element.
  double flux_sign = -1, trace_sign = -1;
  if (form.kind == FormulationKind::acoustics_ultraweak) flux_sign = trace_sign = 1;
  bool has_traces = false;
  for (const auto& c : form.trial)
    has_traces |= (c.master == MasterSpace::trace_V || c.master == MasterSpace::trace_W);
  if (!has_traces) return out;
  for (int e = 0; e < 4; ++e) {
    EdgeTable tr, te;
    for (const auto& c : form.trial) append_edge(tr, el, c.master, c.p, e, edge_rule.points);
    for (const auto& c : form.test) append_edge(te, el, c.space, c.p, e, edge_rule.points);
    for (int k = 0; k < edge_rule.size(); ++k) {
      const double ds = edge_rule.weights[k] * h;
      for (int i = 0; i < ns; ++i) {
        const auto& v = te(i, k);
        if (v.s == 0 && v.vn == 0) continue;
        auto bi = out.b.row(i);
        for (int j = 0; j < nt; ++j) {
          const auto& u = tr(j, k);
          const double val = flux_sign * u.trace_flux * v.s + trace_sign * u.trace_value * v.vn;
          bi[j] += ds * val;
        }
      }
    }
  }
  return out;
}

template ElementMatrices<double> eval_forms(const Formulation&, const Element&, const ManufacturedCase&);
template ElementMatrices<cdouble> eval_forms(const Formulation&, const Element&, const ManufacturedCase&);

}  // namespace dls
