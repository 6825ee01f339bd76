// Copyright (c) 2026 The divfree authors
// SPDX-License-Identifier: MIT

#pragma once

#include <Eigen/Dense>
#include <memory>
#include <mutex>
#include <vector>

#include "divfree/quadrature.hpp"

namespace divfree {

/// Barycentric weights 1/prod_{j!=i}(x_i - x_j) of distinct interpolation nodes.
Eigen::VectorXd barycentric_weights(const Eigen::VectorXd& nodes);

/// Spectral differentiation matrix on the given nodes: maps samples of a
/// polynomial of degree <= n-1 to samples of its derivative. Off-diagonal
/// (lam_j/lam_i)/(x_i-x_j), diagonal the negated row sum.
Eigen::MatrixXd diff_matrix_1d(const Eigen::VectorXd& nodes);

/// Partial-derivative operators DX_i at the simplex quadrature grid: map
/// point values of any polynomial of total degree <= k to point values of
/// d/dx_i of it. Built from per-axis hypercube matrices DZ_j chain-ruled
/// through the Duffy transform; applications use the tensor structure.
/// Dense matrices are materialized lazily, and only while (k+1)^d stays
/// within dense_row_limit.
class DerivativeMatrices {
 public:
  DerivativeMatrices(const SimplexRule& quad, Eigen::Index dense_row_limit = 20000);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  Eigen::Index rows() const { return rows_; }

  /// out = DX_i * in, column by column (i is 0-based).
  Eigen::MatrixXd apply(int i, const Eigen::Ref<const Eigen::MatrixXd>& in) const;

  /// Dense DX_i, assembled by Kronecker composition (independent of apply()'s
  /// strided path). Throws when rows() exceeds the dense limit.
  const Eigen::MatrixXd& dense(int i) const;

  /// Hypercube per-axis matrix (axis j, 0-based), mostly for tests.
  const Eigen::MatrixXd& axis_matrix(int j) const { return dz_[static_cast<std::size_t>(j)]; }

 private:
  int dim_ = 0;
  int degree_ = 0;
  Eigen::Index rows_ = 0;
  Eigen::Index n1_ = 0;
  Eigen::Index dense_row_limit_ = 0;
  std::vector<Eigen::MatrixXd> dz_;
  // Chain-rule diagonals per point and axis j: own(q,j) = dz_j/dx_j = 1/S_j,
  // carry(q,j) = dz_j/dx_i for i<j = z_j/S_j, with S_j = prod_{m<j}(1-z_m).
  Eigen::MatrixXd own_;
  Eigen::MatrixXd carry_;
  // Applies DZ along tensor axis j to every column of in.
  Eigen::MatrixXd apply_axis(int j, const Eigen::Ref<const Eigen::MatrixXd>& in) const;

  mutable std::mutex dense_mutex_;
  mutable std::vector<std::unique_ptr<Eigen::MatrixXd>> dense_;
};

/// Convenience builder matching the module contract.
inline DerivativeMatrices simplex_diff(const SimplexRule& quad) { return DerivativeMatrices(quad); }

}  // namespace divfree
