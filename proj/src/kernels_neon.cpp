// Copyright (c) 2026 The divfree authors
// SPDX-License-Identifier: MIT

// NEON kernel variants for aarch64 (NEON is architecturally guaranteed there,
// so no runtime probe is needed).

#include <arm_neon.h>

#include <cstddef>

#include "divfree/kernels.hpp"

namespace divfree::kernels {

namespace {

double dot_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t a0 = vdupq_n_f64(0.0), a1 = vdupq_n_f64(0.0);
  float64x2_t a2 = vdupq_n_f64(0.0), a3 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = vfmaq_f64(a0, vld1q_f64(x + i), vld1q_f64(y + i));
    a1 = vfmaq_f64(a1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
    a2 = vfmaq_f64(a2, vld1q_f64(x + i + 4), vld1q_f64(y + i + 4));
    a3 = vfmaq_f64(a3, vld1q_f64(x + i + 6), vld1q_f64(y + i + 6));
  }
  for (; i + 2 <= n; i += 2) a0 = vfmaq_f64(a0, vld1q_f64(x + i), vld1q_f64(y + i));
  double s = vaddvq_f64(vaddq_f64(a0, a1)) + vaddvq_f64(vaddq_f64(a2, a3));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double wdot_neon(const double* x, const double* w, const double* y, std::size_t n) {
  float64x2_t a0 = vdupq_n_f64(0.0), a1 = vdupq_n_f64(0.0);
  float64x2_t a2 = vdupq_n_f64(0.0), a3 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = vfmaq_f64(a0, vmulq_f64(vld1q_f64(x + i), vld1q_f64(w + i)), vld1q_f64(y + i));
    a1 = vfmaq_f64(a1, vmulq_f64(vld1q_f64(x + i + 2), vld1q_f64(w + i + 2)), vld1q_f64(y + i + 2));
    a2 = vfmaq_f64(a2, vmulq_f64(vld1q_f64(x + i + 4), vld1q_f64(w + i + 4)), vld1q_f64(y + i + 4));
    a3 = vfmaq_f64(a3, vmulq_f64(vld1q_f64(x + i + 6), vld1q_f64(w + i + 6)), vld1q_f64(y + i + 6));
  }
  for (; i + 2 <= n; i += 2)
    a0 = vfmaq_f64(a0, vmulq_f64(vld1q_f64(x + i), vld1q_f64(w + i)), vld1q_f64(y + i));
  double s = vaddvq_f64(vaddq_f64(a0, a1)) + vaddvq_f64(vaddq_f64(a2, a3));
  for (; i < n; ++i) s += x[i] * w[i] * y[i];
  return s;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    vst1q_f64(y + i + 2, vfmaq_f64(vld1q_f64(y + i + 2), va, vld1q_f64(x + i + 2)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scal_neon(double a, double* x, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

void emul_neon(const double* x, const double* y, double* z, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(z + i, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
  for (; i < n; ++i) z[i] = x[i] * y[i];
}

}  // namespace

extern const Ops neon_ops = {dot_neon, wdot_neon, axpy_neon, scal_neon, emul_neon, "neon"};

}  // namespace divfree::kernels
