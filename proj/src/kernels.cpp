// Copyright (c) 2026 The divfree authors
// SPDX-License-Identifier: MIT

#include "divfree/kernels.hpp"

#include <atomic>

namespace divfree::kernels {

namespace {

// Four independent accumulators: keeps summation error well below the
// orthonormality budget (5e-14) for the vector lengths used here (~2e5).
double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += x[i] * y[i];
    s1 += x[i + 1] * y[i + 1];
    s2 += x[i + 2] * y[i + 2];
    s3 += x[i + 3] * y[i + 3];
  }
  for (; i < n; ++i) s0 += x[i] * y[i];
  return (s0 + s1) + (s2 + s3);
}

double wdot_scalar(const double* x, const double* w, const double* y, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += x[i] * w[i] * y[i];
    s1 += x[i + 1] * w[i + 1] * y[i + 1];
    s2 += x[i + 2] * w[i + 2] * y[i + 2];
    s3 += x[i + 3] * w[i + 3] * y[i + 3];
  }
  for (; i < n; ++i) s0 += x[i] * w[i] * y[i];
  return (s0 + s1) + (s2 + s3);
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scal_scalar(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void emul_scalar(const double* x, const double* y, double* z, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) z[i] = x[i] * y[i];
}

constexpr Ops scalar_ops = {dot_scalar, wdot_scalar, axpy_scalar,
                            scal_scalar, emul_scalar, "scalar"};

}  // namespace

#ifdef DIVFREE_HAVE_AVX2
extern const Ops avx2_ops;  // kernels_avx2.cpp
bool cpu_has_avx2();
#endif
#ifdef DIVFREE_HAVE_NEON
extern const Ops neon_ops;  // kernels_neon.cpp
#endif

namespace {

const Ops* select() {
#ifdef DIVFREE_HAVE_AVX2
  if (cpu_has_avx2()) return &avx2_ops;
#endif
#ifdef DIVFREE_HAVE_NEON
  return &neon_ops;
#endif
  return &scalar_ops;
}

std::atomic<const Ops*> g_active{nullptr};

}  // namespace

const Ops& ops() {
  const Ops* p = g_active.load(std::memory_order_acquire);
  if (!p) {
    p = select();
    g_active.store(p, std::memory_order_release);
  }
  return *p;
}

const Ops* find(std::string_view name) {
  if (name == "scalar") return &scalar_ops;
#ifdef DIVFREE_HAVE_AVX2
  if (name == "avx2" && cpu_has_avx2()) return &avx2_ops;
#endif
#ifdef DIVFREE_HAVE_NEON
  if (name == "neon") return &neon_ops;
#endif
  return nullptr;
}

std::size_t available(const Ops** out, std::size_t cap) {
  std::size_t k = 0;
  if (k < cap) out[k++] = &scalar_ops;
#ifdef DIVFREE_HAVE_AVX2
  if (cpu_has_avx2() && k < cap) out[k++] = &avx2_ops;
#endif
#ifdef DIVFREE_HAVE_NEON
  if (k < cap) out[k++] = &neon_ops;
#endif
  return k;
}

bool force_backend(std::string_view name) {
  if (name.empty()) {
    g_active.store(select(), std::memory_order_release);
    return true;
  }
  const Ops* p = find(name);
  if (!p) return false;
  g_active.store(p, std::memory_order_release);
  return true;
}

}  // namespace divfree::kernels
