// Copyright (c) 2026 The divfree authors
// SPDX-License-Identifier: MIT

#include "divfree/divfree_basis.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "divfree/combinatorics.hpp"
#include "divfree/kernels.hpp"

namespace divfree {

namespace {

double factorial_d(int d) { return static_cast<double>(factorial(d)); }

}  // namespace

// W(:, degree-j cols) = V(:, 0:p_j) * Nmat(block i, degree-j cols) per
// component; the staircase sparsity makes the skipped rows exact zeros.
Eigen::MatrixXd combine_values(const Eigen::MatrixXd& V, const Eigen::MatrixXd& Nmat,
                               const DivFreeRefBasis& ref) {
  const int d = ref.dim;
  const Eigen::Index p = ref.ortho.n_cols();
  const Eigen::Index np = V.rows();
  const Eigen::Index n = Nmat.cols();
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(d * np, n);
  for (int j = 0; j <= ref.degree; ++j) {
    const Eigen::Index lo = j == 0 ? 0 : ref.n_offsets[j - 1];
    const Eigen::Index width = ref.n_offsets[j] - lo;
    if (width == 0) continue;
    const Eigen::Index pj = poly_space_dim(d, j);
    for (int i = 0; i < d; ++i)
      W.block(i * np, lo, np, width).noalias() =
          V.leftCols(pj) * Nmat.block(i * p, lo, pj, width);
  }
  return W;
}

int DivFreeRefBasis::func_degree(Eigen::Index ell) const {
  for (int j = 0; j <= degree; ++j)
    if (ell < n_offsets[j]) return j;
  throw std::out_of_range("divfree: function index out of range");
}

Eigen::MatrixXd constraint_matrix(const OrthoPolyBasis& ortho, const DerivativeMatrices& dmats) {
  const int d = ortho.dim;
  const int k = ortho.degree;
  const Eigen::Index p = ortho.n_cols();
  const Eigen::Index m = ortho.Q.rows();
  const Eigen::Index rows = k >= 1 ? ortho.offsets[k - 1] : 0;
  const double scale = factorial_d(d);
  const auto& kn = kernels::ops();
  const double* w = ortho.quad.weights.data();

  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(rows, d * p);
  for (int i = 0; i < d; ++i) {
    Eigen::MatrixXd DQ = dmats.apply(i, ortho.Q);
    for (Eigen::Index r = 0; r < p; ++r) {
      const int jr = ortho.col_degree(r);
      if (jr == 0) continue;
      const Eigen::Index nr = ortho.offsets[jr - 1];
      double* v = DQ.col(r).data();
      for (int sweep = 0; sweep < 2; ++sweep) {
        for (Eigen::Index s = 0; s < nr; ++s) {
          const double* qs = ortho.Q.col(s).data();
          const double h = scale * kn.wdot(qs, w, v, static_cast<std::size_t>(m));
          C(s, i * p + r) += h;
          kn.axpy(-h, qs, v, static_cast<std::size_t>(m));
        }
      }
    }
  }
  return C;
}

DivFreeRefBasis build_divfree_ref(OrthoPolyBasis ortho, const DerivativeMatrices& dmats) {
  DivFreeRefBasis ref;
  ref.dim = ortho.dim;
  ref.degree = ortho.degree;
  const int d = ref.dim;
  const int k = ref.degree;
  const Eigen::Index p = ortho.n_cols();
  const Eigen::Index n = divfree_space_dim(d, k);

  ref.C = constraint_matrix(ortho, dmats);
  ref.ortho = std::move(ortho);
  ref.N = Eigen::MatrixXd::Zero(d * p, n);
  ref.n_offsets.resize(k + 1);
  for (int j = 0; j <= k; ++j) ref.n_offsets[j] = divfree_space_dim(d, j);

  for (int i = 0; i < d; ++i) ref.N(i * p, i) = 1.0;  // degree 0: constants e_i

  for (int j = 1; j <= k; ++j) {
    const Eigen::Index pj = poly_space_dim(d, j);
    const Eigen::Index pjm = poly_space_dim(d, j - 1);
    const Eigen::Index njm = ref.n_offsets[j - 1];
    const Eigen::Index nj = ref.n_offsets[j];
    const Eigen::Index want = nj - njm;

    // Augmented system over the degree <= j coefficient block: rows enforce
    // zero divergence moments and orthogonality to the prior columns.
    Eigen::MatrixXd aug(pjm + njm, d * pj);
    for (int i = 0; i < d; ++i) {
      aug.block(0, i * pj, pjm, pj) = ref.C.block(0, i * p, pjm, pj);
      aug.block(pjm, i * pj, njm, pj) = ref.N.block(i * p, 0, pj, njm).transpose();
    }

    Eigen::BDCSVD<Eigen::MatrixXd> svd(aug, Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    const double thresh = static_cast<double>(std::max(aug.rows(), aug.cols())) *
                          std::numeric_limits<double>::epsilon() * smax;
    Eigen::Index rank = 0;
    for (Eigen::Index t = 0; t < sv.size(); ++t)
      if (sv(t) > thresh) ++rank;
    if (aug.cols() - rank != want)
      throw std::runtime_error("divfree: rank deficiency at degree " + std::to_string(j));

    const auto& V = svd.matrixV();
    for (int i = 0; i < d; ++i)
      ref.N.block(i * p, njm, pj, want) = V.block(i * pj, aug.cols() - want, pj, want);
  }

  ref.Qd = combine_values(ref.ortho.Q, ref.N, ref);
  return ref;
}

DivFreeRefBasis build_divfree_ref(int k, int d) {
  OrthoPolyBasis ortho = build_orthopoly(k, d);
  DerivativeMatrices dmats(ortho.quad);
  return build_divfree_ref(std::move(ortho), dmats);
}

DivFreeElemBasis build_divfree_elem(const DivFreeRefBasis& ref,
                                    const Eigen::Ref<const Eigen::MatrixXd>& node_coords,
                                    long element_id) {
  const int d = ref.dim;
  const int k = ref.degree;
  const Eigen::Index p = ref.ortho.n_cols();
  if (node_coords.rows() != d + 1 || node_coords.cols() != d)
    throw std::invalid_argument("divfree: node_coords must be (d+1) x d");

  DivFreeElemBasis eb;
  eb.ref = &ref;
  eb.element = element_id;
  eb.edge.resize(d, d);
  for (int m = 0; m < d; ++m)
    eb.edge.col(m) = (node_coords.row(m + 1) - node_coords.row(0)).transpose();

  const double det = eb.edge.determinant();
  const double scale = eb.edge.colwise().norm().maxCoeff();
  if (!(std::abs(det) > 1e-12 * std::pow(scale, d)))
    throw std::runtime_error("divfree: degenerate element " + std::to_string(element_id));
  eb.jacobian = eb.edge.inverse();
  eb.volume = std::abs(det) / factorial_d(d);

  eb.Ne = Eigen::MatrixXd::Zero(d * p, ref.n_funcs());
  constexpr double kTol = 1e-13;
  for (int j = 0; j <= k; ++j) {
    const Eigen::Index lo = j == 0 ? 0 : ref.n_offsets[j - 1];
    const Eigen::Index width = ref.n_offsets[j] - lo;
    if (width == 0) continue;
    const Eigen::Index pj = poly_space_dim(d, j);

    // Physical components mix through the edge matrix: row block i of the
    // combined coefficients is sum_m E(i,m) * (reference block m).
    Eigen::MatrixXd nbar = Eigen::MatrixXd::Zero(d * pj, width);
    for (int i = 0; i < d; ++i)
      for (int m = 0; m < d; ++m)
        nbar.middleRows(i * pj, pj).noalias() +=
            eb.edge(i, m) * ref.N.block(m * p, lo, pj, width);

    Eigen::MatrixXd prev;
    if (lo > 0) {
      prev.resize(d * pj, lo);
      for (int i = 0; i < d; ++i) prev.middleRows(i * pj, pj) = eb.Ne.block(i * p, 0, pj, lo);
      nbar.noalias() -= prev * (prev.transpose() * nbar).eval();
    }

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(nbar);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d * pj, width);
    if (lo > 0) {
      double tt = (q.transpose() * prev).cwiseAbs().rowwise().sum().maxCoeff();
      if (tt > kTol) {
        q.noalias() -= prev * (prev.transpose() * q).eval();
        Eigen::HouseholderQR<Eigen::MatrixXd> qr2(q);
        q = qr2.householderQ() * Eigen::MatrixXd::Identity(d * pj, width);
        tt = (q.transpose() * prev).cwiseAbs().rowwise().sum().maxCoeff();
        if (tt > kTol)
          throw std::runtime_error("divfree: element too ill-conditioned: " +
                                   std::to_string(element_id));
      }
    }
    for (int i = 0; i < d; ++i) eb.Ne.block(i * p, lo, pj, width) = q.middleRows(i * pj, pj);
  }
  return eb;
}

Eigen::MatrixXd elem_constraint(const DivFreeRefBasis& ref, const Eigen::MatrixXd& jacobian) {
  const int d = ref.dim;
  const Eigen::Index p = ref.ortho.n_cols();
  Eigen::MatrixXd Ce = Eigen::MatrixXd::Zero(ref.C.rows(), d * p);
  for (int i = 0; i < d; ++i)
    for (int m = 0; m < d; ++m)
      Ce.middleCols(i * p, p).noalias() += jacobian(m, i) * ref.C.middleCols(m * p, p);
  return Ce;
}

Eigen::MatrixXd evaluate_divfree(const DivFreeRefBasis& basis,
                                 const Eigen::Ref<const Eigen::MatrixXd>& s) {
  return combine_values(evaluate_orthopoly(basis.ortho, s), basis.N, basis);
}

Eigen::MatrixXd evaluate_divfree(const DivFreeElemBasis& basis,
                                 const Eigen::Ref<const Eigen::MatrixXd>& s) {
  return combine_values(evaluate_orthopoly(basis.ref->ortho, s), basis.Ne, *basis.ref);
}

Eigen::MatrixXd elem_values_at_quad(const DivFreeElemBasis& basis) {
  return combine_values(basis.ref->ortho.Q, basis.Ne, *basis.ref);
}

Eigen::VectorXd project_l2(const DivFreeElemBasis& basis,
                           const Eigen::Ref<const Eigen::VectorXd>& samples) {
  const DivFreeRefBasis& ref = *basis.ref;
  const int d = ref.dim;
  const Eigen::Index m = ref.ortho.Q.rows();
  if (samples.size() != d * m)
    throw std::invalid_argument("divfree: samples must be component-major at the quad grid");
  Eigen::MatrixXd qde = elem_values_at_quad(basis);
  Eigen::VectorXd wd(d * m);
  for (int i = 0; i < d; ++i) wd.segment(i * m, m) = ref.ortho.quad.weights;
  return mgs_with_reorth(qde, samples, wd, factorial_d(d)).first;
}

}  // namespace divfree
