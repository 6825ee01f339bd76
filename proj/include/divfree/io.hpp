// Copyright (c) 2026 The divfree authors
// SPDX-License-Identifier: MIT

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "divfree/divfree_basis.hpp"

namespace divfree {

/// Binary cache of a reference basis. Stores dim, degree and the H, N, C, Q
/// matrices; the quadrature rule, offsets and sampled values are recomputed
/// deterministically on load, so a round trip is bit-identical. Native
/// endianness; the cache is machine-local.
void save_ref_basis(const std::filesystem::path& path, const DivFreeRefBasis& ref);

/// Load a cached basis. Bad magic, version, or shape mismatch: error.
DivFreeRefBasis load_ref_basis(const std::filesystem::path& path);

/// Serve the basis from cache_path when it holds a valid entry for (k, d);
/// otherwise build, save to cache_path (unless empty), and set *rebuilt.
/// An unreadable or stale cache file warns on stderr and rebuilds.
DivFreeRefBasis load_or_build_ref(int k, int d, const std::filesystem::path& cache_path,
                                  bool* rebuilt = nullptr);

/// Plain numeric CSV with a schema tag line. All values are written with 17
/// significant digits, so reruns are bit-identical.
struct CsvTable {
  std::string schema;  // first line: "# schema: <schema>"
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);

}  // namespace divfree
