// Copyright (c) 2026 The divfree authors
// SPDX-License-Identifier: MIT

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "divfree/divfree_basis.hpp"
#include "divfree/mesh.hpp"

namespace divfree {

/// pts (n_p x d) -> values; vector fields return n_p x d, scalars n_p.
using VectorField = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>;
using ScalarField = std::function<Eigen::VectorXd(const Eigen::MatrixXd&)>;

/// Polynomial basis q_j^(f) of the reference face, shared by both adjacent
/// elements through the FaceFrame parameterization.
struct FaceBasis {
  OrthoPolyBasis ortho;  // dimension d-1, degree k
  Eigen::Index m_tilde() const { return ortho.n_cols(); }
  /// Face DOFs per face at degree kp: C(kp+d-1, d-1).
  Eigen::Index m_tilde_at(int kp) const { return ortho.offsets[kp]; }
};

FaceBasis build_face_basis(int k, int d);

/// Local solve data of one element at full degree k: u_h^(e) coefficients in
/// the element divergence-free basis are alpha + sum over local faces g of
/// beta(:, g*m+j) c_j^(g).
struct LocalSolution {
  long element = -1;
  double volume = 0.0;
  Eigen::VectorXd alpha;  // n
  Eigen::MatrixXd beta;   // n x (d+1)*m
};

/// alpha_l = (integral of g . phi_l over the element) / volume, from samples
/// at the element quadrature points (component-major).
Eigen::VectorXd local_alpha(const DivFreeElemBasis& eb,
                            const Eigen::Ref<const Eigen::VectorXd>& g_samples);

/// beta(l, j) = -(integral over the face of q_j^(f) phi_l . n) / volume for
/// one local face; face_ref_pts are the face quadrature nodes mapped into the
/// element reference simplex (n_q x d).
Eigen::MatrixXd local_beta(const DivFreeElemBasis& eb, const FaceBasis& fb,
                           const ElementGeometry& geom, int local_face,
                           const Eigen::Ref<const Eigen::MatrixXd>& face_ref_pts);

/// Running per-element state for the incremental per-degree partial sums.
struct ElementMatrixState {
  int degree = -1;             // highest degree folded into the sums
  Eigen::MatrixXd gram;        // (d+1)m x (d+1)m, rows l <= n' folded in
  Eigen::VectorXd beta_alpha;  // (d+1)m
};

/// Element matrix A^(e,k') (packed (d+1)m' square, scaled by the volume) and
/// the -volume * beta^T alpha vector at degree k_prime, advancing state by the
/// new rows only. k_prime below the state or above the basis degree: error.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> element_matrix_incremental(
    const LocalSolution& loc, const DivFreeRefBasis& ref, const FaceBasis& fb, int k_prime,
    ElementMatrixState& state);

struct ElementContrib {
  Eigen::MatrixXd A;  // (d+1)m' x (d+1)m'
  Eigen::VectorXd b;  // (d+1)m'
};

struct GlobalSystem {
  int degree = 0;            // k'
  Eigen::Index block = 0;    // m' (DOFs per interior face)
  Eigen::Index n_blocks = 0; // interior faces
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd b;
};

/// Scatter element contributions into interior-face DOFs; boundary-face
/// multiplier columns are folded into b with the given coefficients
/// (per global face id, full-degree length, truncated here; empty = zero).
GlobalSystem assemble_global(const SimplicialMesh& mesh,
                             const std::vector<ElementContrib>& contribs, int k_prime,
                             Eigen::Index m_prime,
                             const std::vector<Eigen::VectorXd>* boundary_coeffs = nullptr);

/// Dense Cholesky up to 2000 DOFs, otherwise block-Jacobi preconditioned
/// conjugate gradients to relative residual 1e-13 (at most 10 * size
/// iterations). Non-SPD or non-convergence: error.
Eigen::VectorXd solve_global(const GlobalSystem& sys);

/// Element scalar coefficients lambda_h in the q-basis of degree <= k'-1 from
/// the moment system <lambda_h, div v> = (u_h - g, v) + sum over faces of
/// <lambda_hat, v . n>, tested against v = q_r e_i of degree <= k'.
/// face_qvals: per local face, element q-basis values at the face quadrature
/// nodes (n_q x p). face_mult: per local face multiplier coefficients (m',
/// empty = zero). Least-squares residual above 1e-10 * scale or rank
/// deficiency: error.
Eigen::VectorXd recover_scalar(const DivFreeElemBasis& eb, const ElementGeometry& geom,
                               const FaceBasis& fb, const Eigen::MatrixXd& Ce,
                               const std::vector<Eigen::MatrixXd>& face_qvals,
                               const Eigen::VectorXd& u_divfree, const Eigen::VectorXd& u_poly,
                               const std::vector<Eigen::VectorXd>& face_mult,
                               const Eigen::VectorXd& g_samples, int k_prime);

struct DegreeTimings {
  double assemble = 0.0;
  double solve = 0.0;
  double recover = 0.0;
};

struct HybridSolution {
  int degree = 0;
  const SimplicialMesh* mesh = nullptr;
  std::shared_ptr<const DivFreeRefBasis> ref;
  FaceBasis fbasis;
  std::vector<ElementGeometry> geoms;
  std::vector<DivFreeElemBasis> elems;
  std::vector<LocalSolution> locals;
  std::vector<Eigen::MatrixXd> constraints;          // per element: Ce (p_{k-1} x d*p)
  std::vector<Eigen::VectorXd> face_dofs;            // [k']: interior multipliers
  std::vector<std::vector<Eigen::VectorXd>> u;       // [k'][e]: divfree coefficients, n'
  std::vector<std::vector<Eigen::VectorXd>> u_poly;  // [k'][e]: q-basis part (Poisson), d*p_{k'}
  std::vector<std::vector<Eigen::VectorXd>> lambda;  // [k'][e]: q-basis, p_{k'-1}
  std::vector<Eigen::VectorXd> boundary_coeffs;      // per global face (Laplace)
  double t_ref = 0.0;    // reference basis build/load
  double t_setup = 0.0;  // element bases + locals
  std::vector<DegreeTimings> t_degree;
};

struct HybridOptions {
  std::shared_ptr<const DivFreeRefBasis> ref;  // reuse a cached basis (dim/degree must match)
  bool recover = true;
  unsigned threads = 0;  // 0 = hardware count
};

HybridSolution driver_helmholtz(const SimplicialMesh& mesh, const VectorField& g, int k,
                                const HybridOptions& opts = {});
HybridSolution driver_laplace(const SimplicialMesh& mesh, const ScalarField& lambda_D, int k,
                              const HybridOptions& opts = {});
HybridSolution driver_poisson(const SimplicialMesh& mesh, const ScalarField& f, int k,
                              const HybridOptions& opts = {});

/// x = X_1 + E * xhat for reference points (n_p x d) -> physical (n_p x d).
Eigen::MatrixXd ref_to_physical(const ElementGeometry& geom,
                                const Eigen::Ref<const Eigen::MatrixXd>& ref_pts);

/// u_h of degree k' on element e at reference points: n_p x d.
Eigen::MatrixXd eval_u(const HybridSolution& sol, Eigen::Index e, int k_prime,
                       const Eigen::Ref<const Eigen::MatrixXd>& ref_pts);

/// lambda_h of degree k' on element e at reference points (empty for k' = 0).
Eigen::VectorXd eval_lambda(const HybridSolution& sol, Eigen::Index e, int k_prime,
                            const Eigen::Ref<const Eigen::MatrixXd>& ref_pts);

/// Max abs error of u_h per component against the exact field on a tensor
/// grid per element (pts_per_axis^d points, Duffy-collapsed): (k+1) x d.
Eigen::MatrixXd u_error_table(const HybridSolution& sol, const VectorField& exact,
                              int pts_per_axis);

/// Max abs error of lambda_h against the exact scalar, per degree: k+1.
Eigen::VectorXd lambda_error_table(const HybridSolution& sol, const ScalarField& exact,
                                   int pts_per_axis);

/// Max over interior faces and modes i <= m' of the normal-flux jump moments
/// <q_i^(f), u+ . n+ + u- . n->.
double max_flux_jump(const HybridSolution& sol, int k_prime);

/// Poisson moment consistency: max over elements and s < p_{k'-1} of
/// |(div u_h, q_s) - (f, q_s)|.
double max_divergence_moment_gap(const HybridSolution& sol, const ScalarField& f, int k_prime);

}  // namespace divfree
