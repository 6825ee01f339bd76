// Copyright (c) 2026 The divfree authors
// SPDX-License-Identifier: MIT

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace divfree {

/// One monomial term coef * x^exps * e_component with an exact rational
/// coefficient.
struct MonomialTerm {
  int component = 0;
  std::vector<int> exps;
  std::int64_t num = 1;
  std::int64_t den = 1;
};

/// Divergence-free vector monomial combinations, grouped by degree. Each
/// function is a sum of at most two terms; spans per degree match the
/// orthonormal construction but the functions themselves are raw monomials,
/// so this basis is independent of the Arnoldi pipeline (and ill-conditioned
/// at high degree).
struct MonomialDivFreeBasis {
  int dim = 0;
  int degree = 0;
  std::vector<std::vector<MonomialTerm>> funcs;
  /// n_offsets[j] = functions of degree <= j.
  std::vector<Eigen::Index> n_offsets;
};

MonomialDivFreeBasis build_monomial_divfree(int k, int d);

/// Values at points (n_p x d): d*n_p x n, component-major, same layout as
/// evaluate_divfree.
Eigen::MatrixXd evaluate_monomial_divfree(const MonomialDivFreeBasis& basis,
                                          const Eigen::Ref<const Eigen::MatrixXd>& pts);

/// Exact symbolic divergence of one function: list of (exps, num, den) after
/// combining like monomials. Empty for exactly divergence-free input.
std::vector<MonomialTerm> symbolic_divergence(const MonomialDivFreeBasis& basis,
                                              Eigen::Index ell);

}  // namespace divfree
