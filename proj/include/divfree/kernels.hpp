// Copyright (c) 2026 The divfree authors
// SPDX-License-Identifier: MIT

#pragma once

#include <cstddef>
#include <string_view>

/// Data-parallel inner loops shared by the orthogonalization and evaluation
/// code paths. A scalar reference implementation always exists; SIMD variants
/// (AVX2 on x86-64, NEON on aarch64) are compiled separately and selected at
/// runtime from CPU capabilities. All variants use multiple independent
/// accumulators so reduction roundoff stays near sqrt(n)-free growth; results
/// across backends agree to relative 1e-13 but are not bit-identical.
namespace divfree::kernels {

struct Ops {
  /// sum_i x[i]*y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  /// sum_i x[i]*w[i]*y[i]
  double (*wdot)(const double* x, const double* w, const double* y, std::size_t n);
  /// y[i] += a*x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  /// x[i] *= a
  void (*scal)(double a, double* x, std::size_t n);
  /// z[i] = x[i]*y[i]; z may alias x or y
  void (*emul)(const double* x, const double* y, double* z, std::size_t n);
  const char* name;
};

/// Active table, chosen once from CPU capabilities (or a forced override).
const Ops& ops();

/// Look up a backend by name ("scalar", "avx2", "neon"); nullptr if not
/// compiled in or not runnable on this CPU.
const Ops* find(std::string_view name);

/// Names of all backends runnable on this CPU, reference first.
std::size_t available(const Ops** out, std::size_t cap);

/// Force a specific backend (tests); empty name restores auto-selection.
/// Returns false if the name is unknown or unavailable. Not thread-safe
/// against concurrent kernel users.
bool force_backend(std::string_view name);

}  // namespace divfree::kernels
