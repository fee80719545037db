#include "dls/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dls/errors.hpp"
#include "dls/linalg.hpp"

namespace dls {

template <Scalar T>
EnvelopeCholesky<T> envelope_cholesky(const SparseMatrix<T>& a) {
  using R = real_t<T>;
  EnvelopeCholesky<T> c;
  c.n = a.n;
  c.first.resize(a.n);
  c.start.resize(a.n + 1);
  c.start[0] = 0;
  for (int i = 0; i < a.n; ++i) {
    int f = i;
    for (int k = a.row_start[i]; k < a.row_start[i + 1]; ++k) f = std::min(f, a.col[k]);
    c.first[i] = f;
    c.start[i + 1] = c.start[i] + std::size_t(i - f + 1);
  }
  c.val.assign(c.start[a.n], T(0));
  for (int i = 0; i < a.n; ++i)
    for (int k = a.row_start[i]; k < a.row_start[i + 1]; ++k)
      if (a.col[k] <= i) c.val[c.start[i] + (a.col[k] - c.first[i])] = a.val[k];

  for (int i = 0; i < a.n; ++i) {
    T* li = c.val.data() + c.start[i];
    const int fi = c.first[i];
    for (int j = fi; j < i; ++j) {
      const T* lj = c.val.data() + c.start[j];
      const int fj = c.first[j];
      const int k0 = std::max(fi, fj);
      T s = li[j - fi];
      for (int k = k0; k < j; ++k) s -= li[k - fi] * conj(lj[k - fj]);
      li[j - fi] = s / lj[j - fj];
    }
    R d = real_part(li[i - fi]);
    for (int k = fi; k < i; ++k) d -= abs2(li[k - fi]);
    if (!(d > 0)) throw NotPositiveDefinite("nonpositive pivot at row " + std::to_string(i));
    li[i - fi] = T(std::sqrt(d));
  }
  return c;
}

template <Scalar T>
Vector<T> EnvelopeCholesky<T>::solve(std::span<const T> b) const {
  Vector<T> y(b.begin(), b.end());
  for (int i = 0; i < n; ++i) {
    const T* li = val.data() + start[i];
    T s = y[i];
    for (int k = first[i]; k < i; ++k) s -= li[k - first[i]] * y[k];
    y[i] = s / li[i - first[i]];
  }
  for (int i = n - 1; i >= 0; --i) {
    const T* li = val.data() + start[i];
    y[i] /= conj(li[i - first[i]]);
    for (int k = first[i]; k < i; ++k) y[k] -= conj(li[k - first[i]]) * y[i];
  }
  return y;
}

namespace {

// A row to merge: dense entries for columns base .. base + w.size() - 1.
template <Scalar T>
struct MergeRow {
  int base = 0;
  Vector<T> w;
  T rhs{};
};

// Local triangularization of one row block with its columns sorted.
template <Scalar T>
std::vector<MergeRow<T>> local_rows(const RowBlock<T>& blk, std::span<const T> l, double& residual_sq) {
  const int m = blk.panel.rows();
  const int c = blk.panel.cols();
  std::vector<int> order(c);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return blk.cols[a] < blk.cols[b]; });
  std::vector<int> cols(c);
  for (int k = 0; k < c; ++k) cols[k] = blk.cols[order[k]];
  DenseMatrix<T> sorted(m, c);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < c; ++k) sorted(i, k) = blk.panel(i, order[k]);
  Vector<T> rhs(l.begin() + blk.row_offset, l.begin() + blk.row_offset + m);

  std::vector<MergeRow<T>> out;
  auto emit = [&](int i, int lead) {
    MergeRow<T> row;
    row.base = cols[lead];
    row.w.assign(cols[c - 1] - cols[lead] + 1, T(0));
    for (int k = lead; k < c; ++k) row.w[cols[k] - row.base] = sorted(i, k);
    row.rhs = rhs[i];
    out.push_back(std::move(row));
  };
  if (c == 0) {
    for (const T& v : rhs) residual_sq += double(abs2(v));
    return out;
  }
  if (m < c) {
    for (int i = 0; i < m; ++i) emit(i, 0);
    return out;
  }
  const auto qr = householder_qr(sorted);
  qr.apply_qh(rhs);
  for (int i = c; i < m; ++i) residual_sq += double(abs2(rhs[i]));
  sorted = qr.r();
  for (int i = 0; i < c; ++i) emit(i, i);
  return out;
}

}  // namespace

template <Scalar T>
RowMergeQr<T> row_merge_qr(const RowBlockedMatrix<T>& b, std::span<const T> l, Execution execution) {
  using R = real_t<T>;
  RowMergeQr<T> q;
  q.n = b.cols;
  q.m = b.rows;
  q.r.resize(b.cols);
  q.qtb.assign(b.cols, T(0));

  const int nb = int(b.blocks.size());
  std::vector<std::vector<MergeRow<T>>> local(nb);
  std::vector<double> local_res(nb, 0.0);
  for_each_index(nb, execution, [&](int k) { local[k] = local_rows(b.blocks[k], l, local_res[k]); });

  double residual_sq = 0;
  for (int k = 0; k < nb; ++k) {
    residual_sq += local_res[k];
    for (auto& row : local[k]) {
      int j = row.base;
      for (;;) {
        const int end = row.base + int(row.w.size());
        while (j < end && row.w[j - row.base] == T(0)) ++j;
        if (j >= end) {
          residual_sq += double(abs2(row.rhs));
          break;
        }
        auto& rj = q.r[j];
        if (rj.empty()) {
          rj.assign(row.w.begin() + (j - row.base), row.w.end());
          q.qtb[j] = row.rhs;
          break;
        }
        // Bring both rows to a common extent; R rows only ever grow to the right.
        const int len = std::max(int(rj.size()), end - j);
        rj.resize(len, T(0));
        row.w.resize(j - row.base + len, T(0));
        T* w = row.w.data() + (j - row.base);
        const T a = rj[0];
        if (a == T(0)) {
          std::swap_ranges(rj.begin(), rj.end(), w);
          std::swap(q.qtb[j], row.rhs);
        } else {
          const T bb = w[0];
          const R ra = std::abs(a);
          const R rr = std::sqrt(ra * ra + abs2(bb));
          const R cs = ra / rr;
          const T sn = (a / ra) * conj(bb) / rr;
          for (int t = 0; t < len; ++t) {
            const T x = rj[t], y = w[t];
            rj[t] = cs * x + sn * y;
            w[t] = -conj(sn) * x + cs * y;
          }
          const T x = q.qtb[j], y = row.rhs;
          q.qtb[j] = cs * x + sn * y;
          row.rhs = -conj(sn) * x + cs * y;
        }
        w[0] = T(0);
        ++j;
      }
    }
  }
  q.residual = std::sqrt(residual_sq);

  std::vector<double> colsq(q.n, 0.0);
  for (const auto& blk : b.blocks)
    for (int i = 0; i < blk.panel.rows(); ++i)
      for (int k = 0; k < blk.panel.cols(); ++k) colsq[blk.cols[k]] += double(abs2(blk.panel(i, k)));
  for (int j = 0; j < q.n; ++j) {
    if (q.r[j].empty()) throw RankDeficient("column " + std::to_string(j) + " has no pivot");
    if (double(std::abs(q.r[j][0])) <= 100 * double(epsilon<T>()) * std::sqrt(colsq[j]))
      throw RankDeficient("column " + std::to_string(j) + " is numerically dependent on earlier columns");
  }
  return q;
}

template <Scalar T>
real_t<T> RowMergeQr<T>::max_diagonal() const {
  real_t<T> m = 0;
  for (const auto& row : r)
    if (!row.empty()) m = std::max(m, std::abs(row[0]));
  return m;
}

template <Scalar T>
real_t<T> RowMergeQr<T>::min_diagonal() const {
  real_t<T> m = std::numeric_limits<real_t<T>>::infinity();
  for (const auto& row : r) m = std::min(m, row.empty() ? real_t<T>(0) : std::abs(row[0]));
  return m;
}

template <Scalar T>
Vector<T> RowMergeQr<T>::solve() const {
  Vector<T> x(n, T(0));
  for (int j = n - 1; j >= 0; --j) {
    const auto& row = r[j];
    T s = qtb[j];
    for (int t = 1; t < int(row.size()); ++t) s -= row[t] * x[j + t];
    x[j] = s / row[0];
  }
  return x;
}

#define DLS_INSTANTIATE(T)                                                     \
  template struct EnvelopeCholesky<T>;                                         \
  template EnvelopeCholesky<T> envelope_cholesky(const SparseMatrix<T>&);     \
  template struct RowMergeQr<T>;                                               \
  template RowMergeQr<T> row_merge_qr(const RowBlockedMatrix<T>&, std::span<const T>, Execution);

DLS_INSTANTIATE(float)
DLS_INSTANTIATE(double)
DLS_INSTANTIATE(std::complex<float>)
DLS_INSTANTIATE(std::complex<double>)

}  // namespace dls
