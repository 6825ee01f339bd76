// Copyright (c) 2026 The divfree authors
// SPDX-License-Identifier: MIT

#include "divfree/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "divfree/combinatorics.hpp"

namespace divfree {

namespace {

constexpr char kMagic[4] = {'D', 'F', 'B', '1'};
constexpr std::uint32_t kVersion = 1;

void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
  const std::int64_t rows = m.rows();
  const std::int64_t cols = m.cols();
  os.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
  os.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
  os.write(reinterpret_cast<const char*>(m.data()),
           static_cast<std::streamsize>(sizeof(double)) * rows * cols);
}

Eigen::MatrixXd read_matrix(std::istream& is, const char* what) {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  is.read(reinterpret_cast<char*>(&rows), sizeof(rows));
  is.read(reinterpret_cast<char*>(&cols), sizeof(cols));
  if (!is || rows < 0 || cols < 0 || rows > (1 << 30) || cols > (1 << 30))
    throw std::runtime_error(std::string("basis cache: bad shape for ") + what);
  Eigen::MatrixXd m(rows, cols);
  is.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double)) * rows * cols);
  if (!is) throw std::runtime_error(std::string("basis cache: truncated reading ") + what);
  return m;
}

}  // namespace

void save_ref_basis(const std::filesystem::path& path, const DivFreeRefBasis& ref) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("basis cache: cannot open for writing: " + path.string());
  os.write(kMagic, sizeof(kMagic));
  os.write(reinterpret_cast<const char*>(&kVersion), sizeof(kVersion));
  const std::int32_t dim = ref.dim;
  const std::int32_t degree = ref.degree;
  os.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
  os.write(reinterpret_cast<const char*>(&degree), sizeof(degree));
  write_matrix(os, ref.ortho.H);
  write_matrix(os, ref.N);
  write_matrix(os, ref.C);
  write_matrix(os, ref.ortho.Q);
  if (!os) throw std::runtime_error("basis cache: write failed: " + path.string());
}

DivFreeRefBasis load_ref_basis(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("basis cache: cannot open: " + path.string());
  char magic[4] = {};
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("basis cache: bad magic: " + path.string());
  std::uint32_t version = 0;
  is.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (!is || version != kVersion)
    throw std::runtime_error("basis cache: unsupported version " + std::to_string(version));
  std::int32_t dim = 0;
  std::int32_t degree = 0;
  is.read(reinterpret_cast<char*>(&dim), sizeof(dim));
  is.read(reinterpret_cast<char*>(&degree), sizeof(degree));
  if (!is || dim < 1 || dim > 8 || degree < 0 || degree > 200)
    throw std::runtime_error("basis cache: bad header: " + path.string());

  DivFreeRefBasis ref;
  ref.dim = dim;
  ref.degree = degree;
  ref.ortho.dim = dim;
  ref.ortho.degree = degree;
  ref.ortho.H = read_matrix(is, "H");
  ref.N = read_matrix(is, "N");
  ref.C = read_matrix(is, "C");
  ref.ortho.Q = read_matrix(is, "Q");

  const Eigen::Index p = poly_space_dim(dim, degree);
  const Eigen::Index n = divfree_space_dim(dim, degree);
  ref.ortho.quad = simplex_rule(degree, dim);
  if (ref.ortho.Q.rows() != ref.ortho.quad.points.rows() || ref.ortho.Q.cols() != p ||
      ref.ortho.H.rows() != p || ref.ortho.H.cols() != p - 1 || ref.N.rows() != dim * p ||
      ref.N.cols() != n || ref.C.rows() != poly_space_dim(dim, degree - 1) ||
      ref.C.cols() != dim * p)
    throw std::runtime_error("basis cache: shape mismatch: " + path.string());

  ref.ortho.offsets.resize(degree + 1);
  ref.n_offsets.resize(degree + 1);
  for (int j = 0; j <= degree; ++j) {
    ref.ortho.offsets[j] = poly_space_dim(dim, j);
    ref.n_offsets[j] = divfree_space_dim(dim, j);
  }
  ref.Qd = combine_values(ref.ortho.Q, ref.N, ref);
  return ref;
}

DivFreeRefBasis load_or_build_ref(int k, int d, const std::filesystem::path& cache_path,
                                  bool* rebuilt) {
  if (rebuilt != nullptr) *rebuilt = true;
  if (!cache_path.empty() && std::filesystem::exists(cache_path)) {
    try {
      DivFreeRefBasis ref = load_ref_basis(cache_path);
      if (ref.dim == d && ref.degree == k) {
        if (rebuilt != nullptr) *rebuilt = false;
        return ref;
      }
      std::cerr << "basis cache: " << cache_path.string() << " holds dim " << ref.dim
                << " degree " << ref.degree << ", rebuilding\n";
    } catch (const std::exception& err) {
      std::cerr << "basis cache: " << err.what() << ", rebuilding\n";
    }
  }
  DivFreeRefBasis ref = build_divfree_ref(k, d);
  if (!cache_path.empty()) save_ref_basis(cache_path, ref);
  return ref;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("csv: cannot open for writing: " + path.string());
  os << "# schema: " << table.schema << "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    os << (i == 0 ? "" : ",") << table.columns[i];
  os << "\n";
  char buf[40];
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size())
      throw std::runtime_error("csv: row width does not match the column list");
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
      os << (i == 0 ? "" : ",") << buf;
    }
    os << "\n";
  }
  if (!os) throw std::runtime_error("csv: write failed: " + path.string());
}

}  // namespace divfree
