#pragma once

#include <filesystem>
#include <string>

#include "dls/assembly.hpp"

namespace dls {

/// Lower triangle of a Hermitian matrix ("hermitian" for complex scalars,
/// "symmetric" for real ones).
template <Scalar T>
void write_matrix_market(const std::filesystem::path& path, const SparseMatrix<T>& a);

/// Every stored panel entry, "general".
template <Scalar T>
void write_matrix_market(const std::filesystem::path& path, const RowBlockedMatrix<T>& b);

/// Dense column vector in array format.
template <Scalar T>
void write_matrix_market(const std::filesystem::path& path, const Vector<T>& v);

/// Reads coordinate or array files back into a dense complex matrix,
/// expanding symmetric and Hermitian storage.
DenseMatrix<cdouble> read_matrix_market(const std::filesystem::path& path);

}  // namespace dls
