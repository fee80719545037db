#include "dls/solve.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "dls/errors.hpp"
#include "dls/linalg.hpp"
#include "dls/sparse.hpp"

namespace dls {

template <Scalar T>
Solution<T> complete(const AssemblyRecord<T>& record, Vector<T> reduced, SolverKind solver, Execution execution) {
  const auto& disc = *record.disc;
  Solution<T> sol;
  sol.solver = solver;
  sol.coefficients = record.lift;
  for (int i = 0; i < record.reduced_size(); ++i) sol.coefficients[record.reduced_to_global[i]] += reduced[i];

  const int ne = int(record.elements.size());
  // Bubble DOFs belong to one element, so the writes are disjoint.
  for_each_index(ne, execution, [&](int k) {
    const auto& el = record.elements[k];
    if (el.condensed.bubble.empty()) return;
    Vector<T> ui(el.reduced.size());
    for (std::size_t c = 0; c < ui.size(); ++c) ui[c] = reduced[el.reduced[c]];
    const auto ub = recover_bubbles(el.condensed, ui);
    for (std::size_t c = 0; c < ub.size(); ++c)
      sol.coefficients[disc.dofs[k][el.free[el.condensed.bubble[c]]].global] += ub[c];
  });

  sol.eta.assign(ne, 0.0);
  std::vector<Vector<T>> local_res(ne);
  for_each_index(ne, execution, [&](int k) {
    const auto& el = record.elements[k];
    if (el.direct) return;
    const auto& dofs = disc.dofs[k];
    Vector<T> uk(dofs.size());
    for (std::size_t j = 0; j < dofs.size(); ++j) uk[j] = sol.coefficients[dofs[j].global];
    local_res[k] = subtract(el.lt, multiply(el.bt, uk));
    sol.eta[k] = double(norm2(local_res[k]));
  });
  double total = 0;
  for (int k = 0; k < ne; ++k) {
    sol.residual.insert(sol.residual.end(), local_res[k].begin(), local_res[k].end());
    total += sol.eta[k] * sol.eta[k];
  }
  sol.residual_norm = std::sqrt(total);
  sol.reduced = std::move(reduced);
  return sol;
}

namespace {

template <Scalar T>
void unscale(Vector<T>& u, const std::vector<real_t<T>>& s) {
  for (std::size_t i = 0; i < u.size(); ++i) u[i] *= s[i];
}

}  // namespace

template <Scalar T>
Solution<T> solve_ne(const NormalSystem<T>& system, const SolveOptions& options) {
  auto a = system.a;
  auto f = system.f;
  std::vector<real_t<T>> s;
  if (options.precondition_global && a.n > 0) s = precondition_global(a, f);
  Vector<T> u;
  if (a.n == 0) {
  } else if (options.dense) {
    u = solve_spd(densify(a), f);
  } else {
    u = envelope_cholesky(a).solve(f);
  }
  if (!s.empty()) unscale(u, s);
  return complete(system.record, std::move(u), SolverKind::ne, options.execution);
}

template <Scalar T>
Solution<T> solve_ls(const OverdeterminedSystem<T>& system, const SolveOptions& options) {
  auto b = system.b;
  std::vector<real_t<T>> s;
  if (options.precondition_global && b.cols > 0) s = precondition_global(b);
  Vector<T> u;
  if (b.cols == 0) {
  } else if (options.dense) {
    u = least_squares_qr(densify(b), system.l);
  } else {
    u = row_merge_qr(b, std::span<const T>(system.l), options.execution).solve();
  }
  if (!s.empty()) unscale(u, s);
  return complete(system.record, std::move(u), SolverKind::qr, options.execution);
}

namespace {

template <Scalar T>
void check_constraints(const ConstraintSystem<T>& cs, int n) {
  if (cs.c.rows() > 0 && cs.c.cols() != n)
    throw ConfigError("constraint matrix has " + std::to_string(cs.c.cols()) + " columns, expected " +
                      std::to_string(n));
  if (int(cs.d.size()) != cs.c.rows()) throw ConfigError("constraint right-hand side has the wrong length");
}

}  // namespace

template <Scalar T>
Solution<T> solve_weighted_constraints(const OverdeterminedSystem<T>& system, const ConstraintSystem<T>& cs,
                                       const SolveOptions& options) {
  const int n = system.b.cols;
  check_constraints(cs, n);
  auto b = system.b;
  std::vector<real_t<T>> s;
  if (options.precondition_global && n > 0) s = precondition_global(b);
  const auto bd = densify(b);
  const int l = cs.c.rows();
  DenseMatrix<T> stacked(l + bd.rows(), n);
  Vector<T> rhs(l + bd.rows());
  const T alpha = T(real_t<T>(cs.alpha));
  for (int i = 0; i < l; ++i) {
    for (int j = 0; j < n; ++j) stacked(i, j) = alpha * cs.c(i, j) * (s.empty() ? real_t<T>(1) : s[j]);
    rhs[i] = alpha * cs.d[i];
  }
  for (int i = 0; i < bd.rows(); ++i) {
    for (int j = 0; j < n; ++j) stacked(l + i, j) = bd(i, j);
    rhs[l + i] = system.l[i];
  }
  auto u = least_squares_qr(stacked, rhs);
  if (!s.empty()) unscale(u, s);
  return complete(system.record, std::move(u), SolverKind::qr, options.execution);
}

template <Scalar T>
std::pair<Solution<T>, Vector<T>> solve_saddle_constraints(const NormalSystem<T>& system,
                                                           const ConstraintSystem<T>& cs,
                                                           const SolveOptions& options) {
  const int n = system.a.n;
  check_constraints(cs, n);
  if (cs.c.rows() == 0) return {solve_ne(system, options), Vector<T>{}};
  auto a = system.a;
  auto f = system.f;
  std::vector<real_t<T>> s;
  if (options.precondition_global) s = precondition_global(a, f);
  auto c = cs.c;
  if (!s.empty())
    for (int i = 0; i < c.rows(); ++i)
      for (int j = 0; j < n; ++j) c(i, j) *= s[j];
  auto [u, w] = saddle_solve(densify(a), c, f, cs.d);
  if (!s.empty()) unscale(u, s);
  return {complete(system.record, std::move(u), SolverKind::ne, options.execution), std::move(w)};
}

template <Scalar T>
double spectral_norm(const RowBlockedMatrix<T>& b) {
  using D = promote_t<T>;
  if (b.cols == 0) return 0;
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> dist(-1, 1);
  Vector<D> x(b.cols);
  for (auto& v : x) v = D(dist(gen));
  RowBlockedMatrix<D> bd;
  bd.rows = b.rows;
  bd.cols = b.cols;
  for (const auto& blk : b.blocks) bd.blocks.push_back({blk.row_offset, blk.cols, matrix_cast<D>(blk.panel)});
  double lambda = 0;
  for (int it = 0; it < 500; ++it) {
    const double nx = norm2(x);
    for (auto& v : x) v /= nx;
    auto y = bd.adjoint_multiply(bd.multiply(x));
    const double next = norm2(y);
    x = std::move(y);
    if (std::abs(next - lambda) <= 1e-13 * next) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(lambda);
}

template <Scalar T>
double residual_rho(const RowBlockedMatrix<T>& b, std::span<const T> l, std::span<const T> u) {
  using D = promote_t<T>;
  double nu = 0;
  for (const T& v : u) nu += double(abs2(v));
  nu = std::sqrt(nu);
  if (nu == 0) return std::numeric_limits<double>::infinity();
  const auto bu = b.multiply(u);
  double r = 0;
  for (std::size_t i = 0; i < bu.size(); ++i) r += std::norm(D(l[i]) - D(bu[i]));
  return std::sqrt(r) / (spectral_norm(b) * nu);
}

template <Scalar T>
double condition_ne(const SparseMatrix<T>& a) {
  return condition_number(densify(a));
}

template <Scalar T>
double condition_ls(const RowBlockedMatrix<T>& b) {
  using D = promote_t<T>;
  RowBlockedMatrix<D> bd;
  bd.rows = b.rows;
  bd.cols = b.cols;
  for (const auto& blk : b.blocks) bd.blocks.push_back({blk.row_offset, blk.cols, matrix_cast<D>(blk.panel)});
  return std::sqrt(condition_number(densify(normal_matrix(bd))));
}

#define DLS_INSTANTIATE(T)                                                                                        \
  template Solution<T> solve_ne(const NormalSystem<T>&, const SolveOptions&);                                     \
  template Solution<T> solve_ls(const OverdeterminedSystem<T>&, const SolveOptions&);                             \
  template Solution<T> complete(const AssemblyRecord<T>&, Vector<T>, SolverKind, Execution);                      \
  template Solution<T> solve_weighted_constraints(const OverdeterminedSystem<T>&, const ConstraintSystem<T>&,     \
                                                  const SolveOptions&);                                           \
  template std::pair<Solution<T>, Vector<T>> solve_saddle_constraints(const NormalSystem<T>&,                     \
                                                                      const ConstraintSystem<T>&,                 \
                                                                      const SolveOptions&);                       \
  template double residual_rho(const RowBlockedMatrix<T>&, std::span<const T>, std::span<const T>);              \
  template double spectral_norm(const RowBlockedMatrix<T>&);                                                      \
  template double condition_ne(const SparseMatrix<T>&);                                                           \
  template double condition_ls(const RowBlockedMatrix<T>&);

DLS_INSTANTIATE(float)
DLS_INSTANTIATE(double)
DLS_INSTANTIATE(std::complex<float>)
DLS_INSTANTIATE(std::complex<double>)

}  // namespace dls
