// Copyright (c) 2026 The divfree authors
// SPDX-License-Identifier: MIT

#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "divfree/quadrature.hpp"

namespace divfree {

/// Orthonormal hierarchical polynomial basis q_1..q_p on the unit d-simplex,
/// built degree by degree with an Arnoldi process whose operators are the
/// coordinate multipliers. Normalization: integral of q_i q_j over the
/// reference simplex = delta_ij / d!, i.e. Q^T diag(w) Q * d! = I on the grid.
struct OrthoPolyBasis {
  int dim = 0;
  int degree = 0;
  SimplexRule quad;
  /// Basis values at the quadrature grid, (k+1)^d x p with p = C(k+d, d).
  Eigen::MatrixXd Q;
  /// Recurrence coefficients, p x (p-1) upper Hessenberg, H(c+1, c) > 0.
  Eigen::MatrixXd H;
  /// offsets[j] = C(j+d, d) = number of columns of degree <= j, j = 0..k.
  std::vector<Eigen::Index> offsets;

  Eigen::Index n_cols() const { return Q.cols(); }
  /// Degree of column c (0-based).
  int col_degree(Eigen::Index c) const;
};

/// Two-sweep modified Gram-Schmidt projection of v onto the given columns,
/// which must be orthonormal under scale * diag(w). Returns the accumulated
/// coefficients of both sweeps and the residual v - cols * coef.
std::pair<Eigen::VectorXd, Eigen::VectorXd> mgs_with_reorth(
    const Eigen::Ref<const Eigen::MatrixXd>& cols, const Eigen::Ref<const Eigen::VectorXd>& v,
    const Eigen::Ref<const Eigen::VectorXd>& w, double scale);

/// Build the basis at degree k in dimension d on simplex_rule(k, d).
OrthoPolyBasis build_orthopoly(int k, int d);

/// Evaluate all p basis polynomials at arbitrary points (n_p x d, reference
/// coordinates; points need not lie inside the simplex) via the Hessenberg
/// recurrence. Returns n_p x p, column r = q_{r+1} at the points.
Eigen::MatrixXd evaluate_orthopoly(const OrthoPolyBasis& basis,
                                   const Eigen::Ref<const Eigen::MatrixXd>& s);

}  // namespace divfree
