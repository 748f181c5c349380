#include "secl/matrix.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "secl/error.hpp"

namespace secl {

static_assert(std::endian::native == std::endian::little,
              "binary matrix files assume a little-endian host");

std::string shape_string(Index rows, Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

std::string shape_string(const DenseMatrix& m) { return shape_string(m.rows(), m.cols()); }

void require_finite(const DenseMatrix& m, std::string_view what) {
  for (Index i = 0; i < m.size(); ++i) {
    if (!std::isfinite(m.data()[i])) {
      throw NumericError(std::string(what) + ": non-finite entry at (" +
                         std::to_string(i / m.cols()) + ", " + std::to_string(i % m.cols()) +
                         ")");
    }
  }
}

void write_matrix_binary(const std::filesystem::path& path, const DenseMatrix& m) {
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  if (m.rows() > kMax || m.cols() > kMax) {
    throw ShapeError("matrix too large for binary header: " + shape_string(m));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  const std::array<std::uint32_t, 2> header{static_cast<std::uint32_t>(m.rows()),
                                            static_cast<std::uint32_t>(m.cols())};
  out.write(reinterpret_cast<const char*>(header.data()), sizeof(header));
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
  if (!out) throw Error("write failed: " + path.string());
}

DenseMatrix read_matrix_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path.string());
  std::array<std::uint32_t, 2> header{};
  in.read(reinterpret_cast<char*>(header.data()), sizeof(header));
  if (!in) throw ParseError(path.string(), 0, "truncated (rows, cols) header");
  DenseMatrix m(static_cast<Index>(header[0]), static_cast<Index>(header[1]));
  in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
  if (!in) {
    throw ParseError(path.string(), 0,
                     "payload shorter than header " + shape_string(m) + " promises");
  }
  if (in.peek() != std::ifstream::traits_type::eof()) {
    throw ParseError(path.string(), 0, "trailing bytes after " + shape_string(m) + " payload");
  }
  return m;
}

DenseMatrix to_dense(const SparseMatrix& s) { return DenseMatrix(s); }

}  // namespace secl
