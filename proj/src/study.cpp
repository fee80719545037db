#include "dls/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "dls/errors.hpp"
#include "dls/matrix_market.hpp"

namespace dls {

StudyKind parse_study(const std::string& name) {
  if (name == "converge") return StudyKind::converge;
  if (name == "condition") return StudyKind::condition;
  if (name == "failure") return StudyKind::failure;
  if (name == "acoustics") return StudyKind::acoustics;
  if (name == "compare-fosls") return StudyKind::compare_fosls;
  throw ConfigError("study: unknown study '" + name + "'");
}

std::string to_string(StudyKind kind) {
  switch (kind) {
    case StudyKind::converge: return "converge";
    case StudyKind::condition: return "condition";
    case StudyKind::failure: return "failure";
    case StudyKind::acoustics: return "acoustics";
    case StudyKind::compare_fosls: return "compare-fosls";
  }
  return "?";
}

StudyConfig validated(StudyConfig c) {
  switch (c.study) {
    case StudyKind::acoustics:
      c.formulation = "acoustics-ultraweak";
      if (c.case_name.empty()) c.case_name = "acoustics-resonance";
      break;
    case StudyKind::failure:
      c.ne = c.qr = true;
      if (c.case_name.empty()) c.case_name = "poisson-quartic";
      if (!c.precision) c.precision = Precision::single;
      break;
    case StudyKind::compare_fosls:
      if (c.formulation != "fosls-strong")
        throw ConfigError("formulation: compare-fosls needs fosls-strong, got '" + c.formulation + "'");
      if (c.case_name.empty()) c.case_name = "poisson-alpha-sine";
      if (c.dp_list.empty()) c.dp_list = {c.dp};
      break;
    default:
      if (c.case_name.empty()) c.case_name = "poisson-sine";
  }
  if (!c.precision) c.precision = Precision::double_precision;
  if (!c.conditioning) c.conditioning = c.study == StudyKind::condition || c.study == StudyKind::acoustics;

  if (c.refinements < 1) throw ConfigError("refinements: must be at least 1");
  if (c.n0 < 1) throw ConfigError("n0: must be at least 1");
  if (c.p < 1) throw ConfigError("p: must be at least 1");
  if (c.dp < 0) throw ConfigError("dp: must be nonnegative");
  for (int d : c.dp_list)
    if (d < 0) throw ConfigError("dp: must be nonnegative");
  if (!c.ne && !c.qr) throw ConfigError("solver: at least one of ne, qr is required");
  const auto names = formulation_names();
  if (std::find(names.begin(), names.end(), c.formulation) == names.end())
    throw ConfigError("formulation: unknown formulation '" + c.formulation + "'");
  ManufacturedCase data;
  try {
    data = make_case(c.case_name, c.omega.value_or(0.5001 * 2 * std::numbers::pi));
  } catch (const UnknownCase&) {
    throw ConfigError("case: unknown case '" + c.case_name + "'");
  }
  const auto form = make_formulation(c.formulation, c.p, c.dp, parameters_for(data));
  if (form.complex_field != data.complex_field)
    throw ConfigError("case: '" + c.case_name + "' does not match formulation '" + c.formulation + "'");
  if (form.direct && c.qr) {
    if (c.study == StudyKind::failure)
      throw ConfigError("formulation: the failure study needs a least-squares formulation");
    c.qr = false;
    if (!c.ne) throw ConfigError("solver: " + c.formulation + " supports only ne");
  }
  if (c.dump_matrices && c.out.empty()) throw ConfigError("out: --dump-matrices needs an output directory");
  return c;
}

namespace {

using Clock = std::chrono::steady_clock;

template <Scalar T>
Vector<cdouble> widen(const Vector<T>& v) {
  Vector<cdouble> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = cdouble(v[i]);
  return out;
}

int mesh_size(const StudyConfig& c, int k) { return c.n0 << k; }

template <Scalar T>
StudyRow run_refinement(const StudyConfig& c, const ManufacturedCase& data, int n,
                        std::vector<StudyFailure>& failures) {
  const auto start = Clock::now();
  StudyRow row;
  row.n = n;
  row.h = 1.0 / n;
  const auto disc = discretize(n, make_formulation(c.formulation, c.p, c.dp, parameters_for(data)));
  const auto lift = default_lift(disc, data);
  const AssemblyOptions aopts{c.condense, c.precondition_gram, c.execution};
  const SolveOptions sopts{c.precondition_global, false, c.execution};
  const bool conditioning = c.conditioning.value_or(false);

  auto attempt = [&](const std::string& stage, auto&& f) -> decltype(std::optional(f())) {
    try {
      return f();
    } catch (const Error& e) {
      failures.push_back({n, stage, e.what()});
      return std::nullopt;
    }
  };

  std::optional<NormalSystem<T>> ne;
  std::optional<OverdeterminedSystem<T>> ls;
  if (c.ne || conditioning) ne = attempt("assemble_ne", [&] { return assemble_ne<T>(disc, data, aopts, lift); });
  if (c.qr || (conditioning && !disc.form.direct))
    ls = attempt("assemble_ls", [&] { return assemble_overdetermined<T>(disc, data, aopts, lift); });
  if (ne) row.N = ne->a.n;
  if (ls) {
    row.N = ls->b.cols;
    row.M = ls->b.rows;
  }

  std::optional<Solution<T>> sol_ne, sol_qr;
  if (c.ne && ne) sol_ne = attempt("ne", [&] { return solve_ne(*ne, sopts); });
  if (c.qr && ls) sol_qr = attempt("qr", [&] { return solve_ls(*ls, sopts); });
  if (c.timing) row.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();

  if (sol_ne) row.err_ne = error_norms(disc, widen(sol_ne->coefficients), &data).relative_l2();
  if (sol_qr) {
    row.err_qr = error_norms(disc, widen(sol_qr->coefficients), &data).relative_l2();
    row.rho = residual_rho(ls->b, std::span<const T>(ls->l), std::span<const T>(sol_qr->reduced));
  }
  if (sol_qr)
    row.eta_total = sol_qr->residual_norm;
  else if (sol_ne && !disc.form.direct)
    row.eta_total = sol_ne->residual_norm;

  if (conditioning && row.N > 0 && row.N <= c.max_condition_size) {
    if (ne)
      row.cond_a = attempt("cond_A", [&] {
        auto a = ne->a;
        auto f = ne->f;
        if (c.precondition_global) precondition_global(a, f);
        return condition_ne(a);
      });
    if (ls)
      row.cond_btilde = attempt("cond_Btilde", [&] {
        auto b = ls->b;
        if (c.precondition_global) precondition_global(b);
        return condition_ls(b);
      });
  }

  if (c.dump_matrices) {
    std::filesystem::create_directories(c.out);
    const auto tag = std::to_string(n) + ".mtx";
    if (ne) write_matrix_market(c.out / ("A_" + tag), ne->a);
    if (ls) {
      write_matrix_market(c.out / ("Btilde_" + tag), ls->b);
      write_matrix_market(c.out / ("l_" + tag), ls->l);
    }
  }
  return row;
}

template <class F>
auto by_precision(const StudyConfig& c, bool complex_field, F&& f) {
  const bool single = c.precision == Precision::single;
  if (complex_field)
    return single ? f.template operator()<std::complex<float>>() : f.template operator()<cdouble>();
  return single ? f.template operator()<float>() : f.template operator()<double>();
}

template <class Row>
void put(std::ostream& os, const std::optional<Row>& v) {
  if (!v) return;
  char buf[32];
  if constexpr (std::is_integral_v<Row>)
    std::snprintf(buf, sizeof buf, "%d", int(*v));
  else
    std::snprintf(buf, sizeof buf, "%.10g", double(*v));
  os << buf;
}

// |A - B|_F over two CSR matrices of the same order.
template <Scalar T>
double sparse_distance(const SparseMatrix<T>& a, const SparseMatrix<T>& b) {
  double s = 0;
  for (int i = 0; i < a.n; ++i) {
    int ka = a.row_start[i], kb = b.row_start[i];
    const int ea = a.row_start[i + 1], eb = b.row_start[i + 1];
    while (ka < ea || kb < eb) {
      if (kb >= eb || (ka < ea && a.col[ka] < b.col[kb])) {
        s += abs2(a.val[ka++]);
      } else if (ka >= ea || b.col[kb] < a.col[ka]) {
        s += abs2(b.val[kb++]);
      } else {
        s += abs2(a.val[ka++] - b.val[kb++]);
      }
    }
  }
  return std::sqrt(s);
}

}  // namespace

StudyResult run_study(const StudyConfig& config) {
  const auto c = validated(config);
  if (c.study == StudyKind::compare_fosls)
    throw ConfigError("study: compare-fosls has its own driver");
  const auto data = make_case(c.case_name, c.omega.value_or(0.5001 * 2 * std::numbers::pi));
  StudyResult result;
  for (int k = 0; k < c.refinements; ++k) {
    const int n = mesh_size(c, k);
    result.rows.push_back(by_precision(c, data.complex_field, [&]<Scalar T>() {
      return run_refinement<T>(c, data, n, result.failures);
    }));
  }
  return result;
}

std::string study_csv(const StudyResult& result) {
  std::ostringstream os;
  os << "n,h,N,M,cond_A,cond_Btilde,err_ne,err_qr,rho,eta_total,wall_ms\n";
  for (const auto& r : result.rows) {
    os << r.n << ',';
    put(os, std::optional<double>(r.h));
    os << ',' << r.N << ',';
    put(os, r.M);
    for (const auto* v : {&r.cond_a, &r.cond_btilde, &r.err_ne, &r.err_qr, &r.rho, &r.eta_total, &r.wall_ms}) {
      os << ',';
      put(os, *v);
    }
    os << '\n';
  }
  return os.str();
}

CompareResult compare_fosls(const StudyConfig& config) {
  auto c = validated(config);
  const auto data = make_case(c.case_name);
  const auto params = parameters_for(data);
  const AssemblyOptions aopts{c.condense, c.precondition_gram, c.execution};
  const SolveOptions sopts{c.precondition_global, false, c.execution};
  CompareResult result;
  for (int dp : c.dp_list)
    for (int k = 0; k < c.refinements; ++k) {
      const int n = mesh_size(c, k);
      CompareRow row{n, 1.0 / n, dp, std::nullopt, std::nullopt};
      try {
        const auto disc = discretize(n, make_formulation("fosls-strong", c.p, dp, params));
        const auto ref_disc = discretize(n, make_fosls_reference(c.p, params, dp));
        const auto lift = default_lift(disc, data);
        const auto ref = assemble_ne<double>(ref_disc, data, aopts, lift);
        const auto ne = assemble_ne<double>(disc, data, aopts, lift);
        if (ne.a.n == ref.a.n) {
          double norm = 0;
          for (double v : ref.a.val) norm += v * v;
          row.matrix_distance = sparse_distance(ref.a, ne.a) / std::sqrt(norm);
        }
        const auto u_ref = solve_ne(ref, sopts);
        const auto u = c.qr ? solve_ls(assemble_overdetermined<double>(disc, data, aopts, lift), sopts)
                            : solve_ne(ne, sopts);
        const auto diff = widen(subtract(u.coefficients, u_ref.coefficients));
        const double scale = error_norms(disc, widen(u_ref.coefficients), &data).exact_u;
        row.solution_distance = error_norms(disc, diff, nullptr).u_norm() / scale;
      } catch (const Error& e) {
        result.failures.push_back({n, "dp=" + std::to_string(dp), e.what()});
      }
      result.rows.push_back(row);
    }
  return result;
}

std::string compare_csv(const CompareResult& result) {
  std::ostringstream os;
  os << "n,h,dp,solution_distance,matrix_distance\n";
  for (const auto& r : result.rows) {
    os << r.n << ',';
    put(os, std::optional<double>(r.h));
    os << ',' << r.dp << ',';
    put(os, r.solution_distance);
    os << ',';
    put(os, r.matrix_distance);
    os << '\n';
  }
  return os.str();
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = x.size();
  if (m < 2 || y.size() != m) throw ConfigError("fitted_slope: need at least two matching points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace dls
