#include "dls/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dls/errors.hpp"

namespace dls {

template <Scalar T>
T SparseMatrix<T>::diagonal(int i) const {
  const auto first = col.begin() + row_start[i];
  const auto last = col.begin() + row_start[i + 1];
  const auto it = std::lower_bound(first, last, i);
  if (it == last || *it != i) return T(0);
  return val[it - col.begin()];
}

template <Scalar T>
Vector<T> SparseMatrix<T>::multiply(std::span<const T> x) const {
  Vector<T> y(n, T(0));
  for (int i = 0; i < n; ++i) {
    T s(0);
    for (int k = row_start[i]; k < row_start[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
  return y;
}

template <Scalar T>
Vector<T> RowBlockedMatrix<T>::multiply(std::span<const T> x) const {
  Vector<T> y(rows, T(0));
  for (const auto& b : blocks)
    for (int i = 0; i < b.panel.rows(); ++i) {
      T s(0);
      for (int c = 0; c < b.panel.cols(); ++c) s += b.panel(i, c) * x[b.cols[c]];
      y[b.row_offset + i] = s;
    }
  return y;
}

template <Scalar T>
Vector<T> RowBlockedMatrix<T>::adjoint_multiply(std::span<const T> y) const {
  Vector<T> x(cols, T(0));
  for (const auto& b : blocks)
    for (int i = 0; i < b.panel.rows(); ++i)
      for (int c = 0; c < b.panel.cols(); ++c) x[b.cols[c]] += conj(b.panel(i, c)) * y[b.row_offset + i];
  return x;
}

template <Scalar T>
SparseMatrix<T> from_triplets(int n, std::vector<int> rows, std::vector<int> cols, std::vector<T> vals) {
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rows[a] != rows[b] ? rows[a] < rows[b] : cols[a] < cols[b];
  });
  SparseMatrix<T> m;
  m.n = n;
  m.row_start.assign(n + 1, 0);
  int last_r = -1, last_c = -1;
  for (std::size_t k : order) {
    if (rows[k] == last_r && cols[k] == last_c) {
      m.val.back() += vals[k];
      continue;
    }
    last_r = rows[k];
    last_c = cols[k];
    m.col.push_back(cols[k]);
    m.val.push_back(vals[k]);
    ++m.row_start[rows[k] + 1];
  }
  for (int i = 0; i < n; ++i) m.row_start[i + 1] += m.row_start[i];
  return m;
}

namespace {

template <Scalar D>
void orient(ElementSystem<D>& s, const std::vector<LocalDof>& dofs) {
  if (s.direct) {
    for (int i = 0; i < s.a.rows(); ++i) {
      for (int j = 0; j < s.a.cols(); ++j) s.a(i, j) *= double(dofs[i].sign * dofs[j].sign);
      s.f[i] *= double(dofs[i].sign);
    }
    return;
  }
  for (int i = 0; i < s.b.rows(); ++i)
    for (int j = 0; j < s.b.cols(); ++j) s.b(i, j) *= double(dofs[j].sign);
}

// Element matrices in double, oriented and optionally Gram-preconditioned,
// then converted to the working scalar type.
template <Scalar T, Scalar D>
ElementSystem<T> prepared(const Discretization& disc, const ManufacturedCase& data, bool precondition, int k) {
  auto s = compute_element<D>(disc.form, disc.mesh.elements[k], data);
  orient(s, disc.dofs[k]);
  if (precondition && !s.direct) precondition_gram(s.g, s.b, s.l);
  return system_cast<T>(s);
}

template <Scalar T>
ElementSystem<T> prepared(const Discretization& disc, const ManufacturedCase& data, bool precondition, int k) {
  if (disc.form.complex_field) {
    if constexpr (is_complex_v<T>) return prepared<T, cdouble>(disc, data, precondition, k);
    throw UnsupportedCombination(disc.form.name + " requires a complex scalar type");
  }
  return prepared<T, double>(disc, data, precondition, k);
}

template <Scalar T>
ElementRecord<T> process_element(const Discretization& disc, const ManufacturedCase& data,
                                 const AssemblyOptions& options, bool least_squares, std::span<const cdouble> lift,
                                 int k) {
  auto s = prepared<T>(disc, data, options.precondition_gram, k);
  ElementRecord<T> rec;
  rec.direct = s.direct;
  if (s.direct && least_squares)
    throw UnsupportedCombination(disc.form.name + " has no overdetermined form");
  if (!s.direct) {
    whiten(s);
    rec.bt = s.bt;
    rec.lt = s.lt;
  }

  const auto& dofs = disc.dofs[k];
  const int n = int(dofs.size());
  std::vector<char> fixed(n, 0);
  Vector<T> local_lift(n, T(0));
  bool any_lift = false;
  for (int j = 0; j < n; ++j) {
    fixed[j] = disc.fixed[dofs[j].global];
    if (!fixed[j]) rec.free.push_back(j);
    if (!lift.empty() && lift[dofs[j].global] != cdouble(0)) {
      local_lift[j] = scalar_cast<T>(lift[dofs[j].global]);
      any_lift = true;
    }
  }
  std::span<const T> lift_span;
  if (any_lift) lift_span = local_lift;

  std::vector<char> bubble(rec.free.size(), 0);
  if (options.condense)
    for (std::size_t c = 0; c < rec.free.size(); ++c) bubble[c] = disc.local_bubble[rec.free[c]];

  if (least_squares) {
    auto [b, l] = apply_dirichlet(s.bt, s.lt, fixed, lift_span);
    rec.condensed = condense_ls(b, l, bubble);
  } else if (s.direct) {
    auto [a, f] = apply_dirichlet_square(s.a, s.f, fixed, lift_span);
    rec.condensed = condense_ne(a, f, bubble);
    rec.a = std::move(s.a);
    rec.f = std::move(s.f);
  } else {
    auto [a0, f0] = element_ne(s.bt, s.lt);
    auto [a, f] = apply_dirichlet_square(a0, f0, fixed, lift_span);
    rec.condensed = condense_ne(a, f, bubble);
  }
  return rec;
}

template <Scalar T>
AssemblyRecord<T> run_elements(const Discretization& disc, const ManufacturedCase& data,
                               const AssemblyOptions& options, bool least_squares, std::span<const cdouble> lift) {
  AssemblyRecord<T> rec;
  rec.disc = &disc;
  rec.options = options;
  rec.least_squares = least_squares;
  rec.lift.assign(disc.size, T(0));
  for (std::size_t g = 0; g < lift.size(); ++g) rec.lift[g] = scalar_cast<T>(lift[g]);

  const int ne = int(disc.mesh.elements.size());
  rec.elements.resize(ne);
  for_each_index(ne, options.execution, [&](int k) {
    try {
      rec.elements[k] = process_element<T>(disc, data, options, least_squares, lift, k);
    } catch (Error& e) {
      e.set_element(k);
      throw;
    }
  });

  // Reduced numbering by first appearance in element order.
  std::vector<int> global_to_reduced(disc.size, -1);
  for (auto& el : rec.elements) {
    const auto& dofs = disc.dofs[&el - rec.elements.data()];
    el.reduced.clear();
    for (int c : el.condensed.interface) {
      const int g = dofs[el.free[c]].global;
      if (global_to_reduced[g] < 0) {
        global_to_reduced[g] = rec.reduced_size();
        rec.reduced_to_global.push_back(g);
      }
      el.reduced.push_back(global_to_reduced[g]);
    }
  }
  return rec;
}

}  // namespace

template <Scalar T>
NormalSystem<T> assemble_ne(const Discretization& disc, const ManufacturedCase& data, const AssemblyOptions& options,
                            std::span<const cdouble> lift) {
  NormalSystem<T> sys;
  sys.record = run_elements<T>(disc, data, options, false, lift);
  const int n = sys.record.reduced_size();
  std::vector<int> rows, cols;
  std::vector<T> vals;
  sys.f.assign(n, T(0));
  for (const auto& el : sys.record.elements) {
    const auto& m = el.condensed.matrix;
    for (int i = 0; i < m.rows(); ++i) {
      sys.f[el.reduced[i]] += el.condensed.rhs[i];
      for (int j = 0; j < m.cols(); ++j) {
        rows.push_back(el.reduced[i]);
        cols.push_back(el.reduced[j]);
        vals.push_back(m(i, j));
      }
    }
  }
  sys.a = from_triplets<T>(n, std::move(rows), std::move(cols), std::move(vals));
  return sys;
}

template <Scalar T>
OverdeterminedSystem<T> assemble_overdetermined(const Discretization& disc, const ManufacturedCase& data,
                                                const AssemblyOptions& options, std::span<const cdouble> lift) {
  OverdeterminedSystem<T> sys;
  sys.record = run_elements<T>(disc, data, options, true, lift);
  sys.b.cols = sys.record.reduced_size();
  int offset = 0;
  for (const auto& el : sys.record.elements) {
    RowBlock<T> block;
    block.row_offset = offset;
    block.cols = el.reduced;
    block.panel = el.condensed.matrix;
    sys.l.insert(sys.l.end(), el.condensed.rhs.begin(), el.condensed.rhs.end());
    offset += block.panel.rows();
    sys.b.blocks.push_back(std::move(block));
  }
  sys.b.rows = offset;
  sys.record.rows = offset;
  return sys;
}

template <Scalar T>
std::vector<real_t<T>> precondition_global(SparseMatrix<T>& a, Vector<T>& f) {
  using R = real_t<T>;
  std::vector<R> s(a.n);
  for (int i = 0; i < a.n; ++i) {
    const R d = real_part(a.diagonal(i));
    if (!(d > 0)) throw NonpositiveDiagonal("global diagonal entry " + std::to_string(i) + " is not positive");
    s[i] = R(1) / std::sqrt(d);
  }
  for (int i = 0; i < a.n; ++i) {
    for (int k = a.row_start[i]; k < a.row_start[i + 1]; ++k) a.val[k] *= s[i] * s[a.col[k]];
    if (!f.empty()) f[i] *= s[i];
  }
  return s;
}

template <Scalar T>
std::vector<real_t<T>> precondition_global(RowBlockedMatrix<T>& b) {
  using R = real_t<T>;
  std::vector<R> d(b.cols, R(0));
  for (const auto& blk : b.blocks)
    for (int i = 0; i < blk.panel.rows(); ++i)
      for (int c = 0; c < blk.panel.cols(); ++c) d[blk.cols[c]] += abs2(blk.panel(i, c));
  std::vector<R> s(b.cols);
  for (int j = 0; j < b.cols; ++j) {
    if (!(d[j] > 0)) throw NonpositiveDiagonal("column " + std::to_string(j) + " of the global matrix is zero");
    s[j] = R(1) / std::sqrt(d[j]);
  }
  for (auto& blk : b.blocks)
    for (int i = 0; i < blk.panel.rows(); ++i)
      for (int c = 0; c < blk.panel.cols(); ++c) blk.panel(i, c) *= s[blk.cols[c]];
  return s;
}

template <Scalar T>
DenseMatrix<T> densify(const SparseMatrix<T>& a) {
  DenseMatrix<T> d(a.n, a.n);
  for (int i = 0; i < a.n; ++i)
    for (int k = a.row_start[i]; k < a.row_start[i + 1]; ++k) d(i, a.col[k]) = a.val[k];
  return d;
}

template <Scalar T>
DenseMatrix<T> densify(const RowBlockedMatrix<T>& b) {
  DenseMatrix<T> d(b.rows, b.cols);
  for (const auto& blk : b.blocks)
    for (int i = 0; i < blk.panel.rows(); ++i)
      for (int c = 0; c < blk.panel.cols(); ++c) d(blk.row_offset + i, blk.cols[c]) += blk.panel(i, c);
  return d;
}

template <Scalar T>
SparseMatrix<T> normal_matrix(const RowBlockedMatrix<T>& b) {
  std::vector<int> rows, cols;
  std::vector<T> vals;
  for (const auto& blk : b.blocks) {
    const auto a = adjoint_multiply(blk.panel, blk.panel);
    for (int i = 0; i < a.rows(); ++i)
      for (int j = 0; j < a.cols(); ++j) {
        rows.push_back(blk.cols[i]);
        cols.push_back(blk.cols[j]);
        vals.push_back(a(i, j));
      }
  }
  return from_triplets<T>(b.cols, std::move(rows), std::move(cols), std::move(vals));
}

#define DLS_INSTANTIATE(T)                                                                                          \
  template struct SparseMatrix<T>;                                                                                  \
  template struct RowBlockedMatrix<T>;                                                                              \
  template SparseMatrix<T> from_triplets(int, std::vector<int>, std::vector<int>, std::vector<T>);                  \
  template NormalSystem<T> assemble_ne(const Discretization&, const ManufacturedCase&, const AssemblyOptions&,      \
                                       std::span<const cdouble>);                                                   \
  template OverdeterminedSystem<T> assemble_overdetermined(const Discretization&, const ManufacturedCase&,          \
                                                           const AssemblyOptions&, std::span<const cdouble>);       \
  template std::vector<real_t<T>> precondition_global(SparseMatrix<T>&, Vector<T>&);                                \
  template std::vector<real_t<T>> precondition_global(RowBlockedMatrix<T>&);                                        \
  template DenseMatrix<T> densify(const SparseMatrix<T>&);                                                          \
  template DenseMatrix<T> densify(const RowBlockedMatrix<T>&);                                                      \
  template SparseMatrix<T> normal_matrix(const RowBlockedMatrix<T>&);

DLS_INSTANTIATE(float)
DLS_INSTANTIATE(double)
DLS_INSTANTIATE(std::complex<float>)
DLS_INSTANTIATE(std::complex<double>)

}  // namespace dls
