// Copyright (c) 2026 The divfree authors
// SPDX-License-Identifier: MIT

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "divfree/diffmat.hpp"
#include "divfree/orthopoly.hpp"

namespace divfree {

/// Orthonormal hierarchical divergence-free basis on the reference simplex.
/// Column ell of N holds the q-expansion of phi_ell: phi_ell = sum_{i,r}
/// N[(i-1)p + r][ell] q_r e_i; columns are orthonormal (N^T N = I), and the
/// first n_j columns span all divergence-free vector polynomials of degree
/// <= j (staircase sparsity: rows r > p_j of a degree-j column are exact zeros).
struct DivFreeRefBasis {
  int dim = 0;
  int degree = 0;
  OrthoPolyBasis ortho;
  /// Divergence-constraint coefficients, p_{k-1} x d*p. Entries carry the
  /// basis normalization: C[s][(i-1)p + r] = d! * integral of q_s dq_r/dx_i
  /// over the reference simplex.
  Eigen::MatrixXd C;
  /// Coefficients, d*p x n with n = d*C(k+d,d) - C(k-1+d,d).
  Eigen::MatrixXd N;
  /// Sampled values at the quadrature grid, d*(k+1)^d x n, component-major.
  Eigen::MatrixXd Qd;
  /// n_offsets[j] = number of basis functions of degree <= j, j = 0..k.
  std::vector<Eigen::Index> n_offsets;

  Eigen::Index n_funcs() const { return N.cols(); }
  int func_degree(Eigen::Index ell) const;
};

/// Divergence-free basis of one affine element, expressed in the reference
/// q-basis: phi_ell(x) = sum_{i,r} Ne[(i-1)p + r][ell] q_r(xhat(x)) e_i with
/// physical components e_i. Orthonormal in coefficient space, which makes
/// integral of phi_i . phi_j over the element = delta_ij |volume|.
struct DivFreeElemBasis {
  const DivFreeRefBasis* ref = nullptr;  // non-owning; caller keeps it alive
  long element = -1;
  Eigen::MatrixXd Ne;        // d*p x n
  Eigen::MatrixXd edge;      // E, columns X_{m+1} - X_1
  Eigen::MatrixXd jacobian;  // F = E^{-1}, F(i,j) = dxhat_i/dx_j
  double volume = 0.0;       // |det E| / d!
};

/// Constraint matrix via the two-sweep projection of DX_i q_r onto the lower
/// degree q_s (scale d!, matching the orthonormality convention).
Eigen::MatrixXd constraint_matrix(const OrthoPolyBasis& ortho, const DerivativeMatrices& dmats);

/// Step 1.2: null-space construction per degree. Throws "rank deficiency at
/// degree j" when a null space has unexpected dimension.
DivFreeRefBasis build_divfree_ref(OrthoPolyBasis ortho, const DerivativeMatrices& dmats);

/// Convenience: builds the orthonormal basis and derivative operators too.
DivFreeRefBasis build_divfree_ref(int k, int d);

/// Step 2.1: per-element combination with the edge matrix, classical
/// Gram-Schmidt against prior columns, QR orthonormalization, and the 1e-13
/// conditional reorthogonalization. node_coords is (d+1) x d.
DivFreeElemBasis build_divfree_elem(const DivFreeRefBasis& ref,
                                    const Eigen::Ref<const Eigen::MatrixXd>& node_coords,
                                    long element_id = -1);

/// Element constraint matrix Ce = C * kron(F, I_p); rows s annihilate the
/// element coefficients: Ce(0:p_{j-1}, ii_j) * Ne(ii_j, 0:n_j) = 0. With C's
/// d! scale, physical divergence moments are (div phi, q_s) = |volume| * Ce.
Eigen::MatrixXd elem_constraint(const DivFreeRefBasis& ref, const Eigen::MatrixXd& jacobian);

/// q-basis point values V (n_p x p) times staircase coefficient columns
/// (d*p x n): d*n_p x n, component-major, skipping the structural zeros.
Eigen::MatrixXd combine_values(const Eigen::MatrixXd& V, const Eigen::MatrixXd& Nmat,
                               const DivFreeRefBasis& ref);

/// Values of all basis functions at reference points s (n_p x d): returns
/// d*n_p x n, component-major, exploiting the staircase sparsity.
Eigen::MatrixXd evaluate_divfree(const DivFreeRefBasis& basis,
                                 const Eigen::Ref<const Eigen::MatrixXd>& s);
Eigen::MatrixXd evaluate_divfree(const DivFreeElemBasis& basis,
                                 const Eigen::Ref<const Eigen::MatrixXd>& s);

/// Weighted-l2 projection coefficients of a field sampled component-major at
/// the element quadrature points. Truncating to the first n_j entries gives
/// the degree-j projection (hierarchy).
Eigen::VectorXd project_l2(const DivFreeElemBasis& basis,
                           const Eigen::Ref<const Eigen::VectorXd>& samples);

/// Element-basis values at the quadrature grid (the Qde of project_l2).
Eigen::MatrixXd elem_values_at_quad(const DivFreeElemBasis& basis);

}  // namespace divfree
