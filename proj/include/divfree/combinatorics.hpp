// Copyright (c) 2026 The divfree authors
// SPDX-License-Identifier: MIT

#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace divfree {

constexpr std::int64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

constexpr std::int64_t factorial(int n) {
  std::int64_t r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

/// dim P_k(simplex in d variables) = C(k+d, d); zero for k < 0.
constexpr std::int64_t poly_space_dim(int d, int k) {
  return k < 0 ? 0 : binomial(k + d, d);
}

/// dim of degree-<=k divergence-free vector polynomials: d*C(k+d,d) - C(k-1+d,d).
constexpr std::int64_t divfree_space_dim(int d, int k) {
  return k < 0 ? 0 : d * poly_space_dim(d, k) - poly_space_dim(d, k - 1);
}

/// Monomial exponent tuples for degrees 0..k in the generation order of the
/// basis build: degree block j applies coordinate i = 1..d to the trailing
/// C(j-1+d-i, d-i) members of block j-1. Column c of the orthonormal basis
/// introduces exactly monomial c of this list.
inline std::vector<std::vector<int>> monomial_exponents(int d, int k) {
  if (d < 1 || k < 0) throw std::invalid_argument("monomial_exponents: bad (d, k)");
  std::vector<std::vector<int>> m;
  m.reserve(static_cast<std::size_t>(poly_space_dim(d, k)));
  m.emplace_back(d, 0);
  for (int j = 1; j <= k; ++j) {
    const std::size_t prev_end = static_cast<std::size_t>(poly_space_dim(d, j - 1));
    for (int i = 1; i <= d; ++i) {
      const std::size_t cnt = static_cast<std::size_t>(binomial(j - 1 + d - i, d - i));
      for (std::size_t s = prev_end - cnt; s < prev_end; ++s) {
        std::vector<int> a = m[s];
        a[i - 1] += 1;
        m.push_back(std::move(a));
      }
    }
  }
  return m;
}

}  // namespace divfree
