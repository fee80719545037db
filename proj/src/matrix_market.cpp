#include "dls/matrix_market.hpp"

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "dls/errors.hpp"

namespace dls {

namespace {

using File = std::unique_ptr<std::FILE, int (*)(std::FILE*)>;

File open(const std::filesystem::path& path) {
  File f(std::fopen(path.c_str(), "w"), &std::fclose);
  if (!f) throw ConfigError("cannot write " + path.string());
  return f;
}

template <Scalar T>
const char* field() {
  return is_complex_v<T> ? "complex" : "real";
}

template <Scalar T>
void put(std::FILE* f, const T& v) {
  if constexpr (is_complex_v<T>)
    std::fprintf(f, " %.17g %.17g\n", double(v.real()), double(v.imag()));
  else
    std::fprintf(f, " %.17g\n", double(v));
}

}  // namespace

template <Scalar T>
void write_matrix_market(const std::filesystem::path& path, const SparseMatrix<T>& a) {
  auto f = open(path);
  std::size_t count = 0;
  for (int i = 0; i < a.n; ++i)
    for (int k = a.row_start[i]; k < a.row_start[i + 1]; ++k) count += a.col[k] <= i;
  std::fprintf(f.get(), "%%%%MatrixMarket matrix coordinate %s %s\n", field<T>(),
               is_complex_v<T> ? "hermitian" : "symmetric");
  std::fprintf(f.get(), "%d %d %zu\n", a.n, a.n, count);
  for (int i = 0; i < a.n; ++i)
    for (int k = a.row_start[i]; k < a.row_start[i + 1]; ++k)
      if (a.col[k] <= i) {
        std::fprintf(f.get(), "%d %d", i + 1, a.col[k] + 1);
        put(f.get(), a.val[k]);
      }
}

template <Scalar T>
void write_matrix_market(const std::filesystem::path& path, const RowBlockedMatrix<T>& b) {
  auto f = open(path);
  std::size_t count = 0;
  for (const auto& blk : b.blocks)
    for (const T& v : blk.panel.data()) count += v != T(0);
  std::fprintf(f.get(), "%%%%MatrixMarket matrix coordinate %s general\n", field<T>());
  std::fprintf(f.get(), "%d %d %zu\n", b.rows, b.cols, count);
  for (const auto& blk : b.blocks)
    for (int i = 0; i < blk.panel.rows(); ++i)
      for (int j = 0; j < blk.panel.cols(); ++j)
        if (blk.panel(i, j) != T(0)) {
          std::fprintf(f.get(), "%d %d", blk.row_offset + i + 1, blk.cols[j] + 1);
          put(f.get(), blk.panel(i, j));
        }
}

template <Scalar T>
void write_matrix_market(const std::filesystem::path& path, const Vector<T>& v) {
  auto f = open(path);
  std::fprintf(f.get(), "%%%%MatrixMarket matrix array %s general\n", field<T>());
  std::fprintf(f.get(), "%zu 1\n", v.size());
  for (const T& x : v) put(f.get(), x);
}

DenseMatrix<cdouble> read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  std::istringstream header(line);
  std::string banner, object, format, kind, symmetry;
  header >> banner >> object >> format >> kind >> symmetry;
  if (banner != "%%MatrixMarket") throw ConfigError(path.string() + " is not a Matrix Market file");
  while (std::getline(in, line) && !line.empty() && line[0] == '%') {
  }
  std::istringstream sizes(line);
  int rows = 0, cols = 0;
  std::size_t count = 0;
  sizes >> rows >> cols;
  const bool complex = kind == "complex";
  auto value = [&](std::istream& s) {
    double re = 0, im = 0;
    s >> re;
    if (complex) s >> im;
    return cdouble(re, im);
  };
  DenseMatrix<cdouble> m(rows, cols);
  if (format == "array") {
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) m(i, j) = value(in);
    return m;
  }
  sizes >> count;
  for (std::size_t k = 0; k < count; ++k) {
    int i = 0, j = 0;
    in >> i >> j;
    const cdouble v = value(in);
    m(i - 1, j - 1) = v;
    if (i != j && symmetry == "symmetric") m(j - 1, i - 1) = v;
    if (i != j && symmetry == "hermitian") m(j - 1, i - 1) = std::conj(v);
  }
  if (!in) throw ConfigError(path.string() + " ended early");
  return m;
}

#define DLS_INSTANTIATE(T)                                                                  \
  template void write_matrix_market(const std::filesystem::path&, const SparseMatrix<T>&);     \
  template void write_matrix_market(const std::filesystem::path&, const RowBlockedMatrix<T>&); \
  template void write_matrix_market(const std::filesystem::path&, const Vector<T>&);

DLS_INSTANTIATE(float)
DLS_INSTANTIATE(double)
DLS_INSTANTIATE(std::complex<float>)
DLS_INSTANTIATE(std::complex<double>)

}  // namespace dls
