#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace secl {

// Row-major 64-bit dense matrix; the numeric carrier for every embedding,
// similarity and parameter tensor.
using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// CSR-style sparse matrix used for A, A + I and the normalized adjacency.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, std::int64_t>;

using Index = std::int64_t;

// "rows x cols" for error messages.
std::string shape_string(const DenseMatrix& m);
std::string shape_string(Index rows, Index cols);

// Throws NumericError naming `what` if any entry is NaN or Inf.
void require_finite(const DenseMatrix& m, std::string_view what);

// Binary matrix file: uint32 rows, uint32 cols (little-endian), followed by
// rows*cols little-endian float64 values in row-major order.
void write_matrix_binary(const std::filesystem::path& path, const DenseMatrix& m);
DenseMatrix read_matrix_binary(const std::filesystem::path& path);

// Dense copy of a sparse matrix.
DenseMatrix to_dense(const SparseMatrix& s);

}  // namespace secl
