// Copyright (c) 2026 The divfree authors
// SPDX-License-Identifier: MIT

#pragma once

#include <Eigen/Dense>

namespace divfree {

/// Gauss rule on [0,1] for the weight (1-x)^alpha.
struct GaussRule1d {
  Eigen::VectorXd nodes;    // strictly increasing, in (0,1)
  Eigen::VectorXd weights;  // positive; sum = 1/(alpha+1)
  int alpha = 0;
};

/// n-node rule, exact for x^m (1-x)^alpha with m <= 2n-1. Nodes from the
/// Golub-Welsch tridiagonal eigenproblem for Jacobi(alpha, 0) polynomials.
GaussRule1d gauss_jacobi_01(int n, int alpha);

/// Tensor Gauss-Jacobi rule on the unit d-simplex via the Duffy transform.
/// (k+1)^d points; dimension j uses gauss_jacobi_01(k+1, d-j) so the Duffy
/// Jacobian is absorbed by the weights. sum(weights) = 1/d!; the physical
/// integral of f over an affine element is |volume| * d! * sum(w_q f_q).
struct SimplexRule {
  int dim = 0;
  int degree = 0;                // k; rule is exact for total degree <= 2k+1
  Eigen::MatrixXd points;        // (k+1)^d x d simplex coordinates
  Eigen::MatrixXd cube_points;   // (k+1)^d x d Duffy preimages in (0,1)^d
  Eigen::VectorXd weights;       // (k+1)^d positive weights
};

/// Duffy collapse of hypercube coordinates (rows = points):
/// x1 = z1, xj = zj * prod_{i<j} (1 - zi).
Eigen::MatrixXd duffy_map(const Eigen::MatrixXd& cube_pts);

/// Build (and memoize) the simplex rule for degree k in dimension d.
/// The first coordinate varies fastest in the tensor ordering.
SimplexRule simplex_rule(int k, int d);

/// Tensor grid of n^d cube points (linspace including endpoints) collapsed
/// onto the simplex by the Duffy map; n^d x d, first coordinate fastest.
Eigen::MatrixXd simplex_grid(int n, int d);

}  // namespace divfree
