// Copyright (c) 2026 The divfree authors
// SPDX-License-Identifier: MIT

#include "divfree/orthopoly.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "divfree/combinatorics.hpp"
#include "divfree/kernels.hpp"

namespace divfree {

int OrthoPolyBasis::col_degree(Eigen::Index c) const {
  for (int j = 0; j <= degree; ++j)
    if (c < offsets[static_cast<std::size_t>(j)]) return j;
  throw std::out_of_range("OrthoPolyBasis::col_degree: column out of range");
}

namespace {

// One MGS sweep pair over contiguous column storage; coefficients accumulate.
void mgs_sweeps(const double* cols, Eigen::Index ld, Eigen::Index ncols, const double* w,
                double scale, double* v, double* coef) {
  const auto& k = kernels::ops();
  for (int sweep = 0; sweep < 2; ++sweep) {
    for (Eigen::Index r = 0; r < ncols; ++r) {
      const double* q = cols + r * ld;
      const double h = scale * k.wdot(q, w, v, static_cast<std::size_t>(ld));
      k.axpy(-h, q, v, static_cast<std::size_t>(ld));
      coef[r] += h;
    }
  }
}

}  // namespace

std::pair<Eigen::VectorXd, Eigen::VectorXd> mgs_with_reorth(
    const Eigen::Ref<const Eigen::MatrixXd>& cols, const Eigen::Ref<const Eigen::VectorXd>& v,
    const Eigen::Ref<const Eigen::VectorXd>& w, double scale) {
  if (cols.rows() != v.size() || v.size() != w.size())
    throw std::invalid_argument("mgs_with_reorth: size mismatch");
  Eigen::VectorXd res = v;
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(cols.cols());
  // Ref may be a non-contiguous block; normalize to owned column-major data.
  const Eigen::MatrixXd colbuf = cols;
  mgs_sweeps(colbuf.data(), colbuf.rows(), colbuf.cols(), w.data(), scale, res.data(),
             coef.data());
  return {coef, res};
}

OrthoPolyBasis build_orthopoly(int k, int d) {
  if (k < 0 || d < 1) throw std::invalid_argument("build_orthopoly: need k >= 0, d >= 1");
  OrthoPolyBasis b;
  b.dim = d;
  b.degree = k;
  b.quad = simplex_rule(k, d);

  const Eigen::Index m = b.quad.points.rows();
  const Eigen::Index p = poly_space_dim(d, k);
  const double dfac = static_cast<double>(factorial(d));
  const double sqrt_dfac = std::sqrt(dfac);
  const auto& kn = kernels::ops();
  const double* w = b.quad.weights.data();

  b.Q.resize(m, p);
  b.H = Eigen::MatrixXd::Zero(p, p - 1 > 0 ? p - 1 : 0);
  b.offsets.resize(static_cast<std::size_t>(k) + 1);
  for (int j = 0; j <= k; ++j) b.offsets[static_cast<std::size_t>(j)] = poly_space_dim(d, j);

  // q_1 = 1 satisfies the normalization: sum(w) * d! = 1.
  b.Q.col(0).setConstant(1.0);
  Eigen::VectorXd v(m);
  Eigen::Index c = 1;
  for (int j = 1; j <= k; ++j) {
    const Eigen::Index prev_end = poly_space_dim(d, j - 1);
    for (int i = 1; i <= d; ++i) {
      const Eigen::Index jpp = binomial(j - 1 + d - i, d - i);
      for (Eigen::Index jp = 1; jp <= jpp; ++jp) {
        const Eigen::Index src = prev_end - jpp + jp - 1;
        kn.emul(b.quad.points.col(i - 1).data(), b.Q.col(src).data(), v.data(),
                static_cast<std::size_t>(m));
        const Eigen::Index hcol = c - 1;
        mgs_sweeps(b.Q.data(), m, c, w, dfac, v.data(), b.H.col(hcol).data());
        const double nrm = std::sqrt(kn.wdot(v.data(), w, v.data(), static_cast<std::size_t>(m)));
        const double hsub = nrm * sqrt_dfac;
        if (hsub <= 1e-13 * sqrt_dfac)
          throw std::runtime_error("build_orthopoly: numerical degeneracy at degree " +
                                   std::to_string(j));
        b.H(c, hcol) = hsub;
        kn.scal(1.0 / hsub, v.data(), static_cast<std::size_t>(m));
        b.Q.col(c) = v;
        ++c;
      }
    }
  }
  return b;
}

Eigen::MatrixXd evaluate_orthopoly(const OrthoPolyBasis& basis,
                                   const Eigen::Ref<const Eigen::MatrixXd>& s) {
  const int d = basis.dim, k = basis.degree;
  if (s.cols() != d) throw std::invalid_argument("evaluate_orthopoly: wrong point dimension");
  const Eigen::Index np = s.rows();
  const Eigen::Index p = basis.n_cols();
  const auto& kn = kernels::ops();

  Eigen::MatrixXd V(np, p);
  V.col(0).setConstant(1.0);
  if (np == 0 || p == 1) return V;

  // Same loop order as the build; H already contains both sweeps' sums.
  const Eigen::MatrixXd scoord = s;  // contiguous columns
  Eigen::VectorXd v(np);
  Eigen::Index c = 1;
  for (int j = 1; j <= k; ++j) {
    const Eigen::Index prev_end = poly_space_dim(d, j - 1);
    for (int i = 1; i <= d; ++i) {
      const Eigen::Index jpp = binomial(j - 1 + d - i, d - i);
      for (Eigen::Index jp = 1; jp <= jpp; ++jp) {
        const Eigen::Index src = prev_end - jpp + jp - 1;
        kn.emul(scoord.col(i - 1).data(), V.col(src).data(), v.data(),
                static_cast<std::size_t>(np));
        const Eigen::Index hcol = c - 1;
        for (Eigen::Index r = 0; r < c; ++r)
          kn.axpy(-basis.H(r, hcol), V.col(r).data(), v.data(), static_cast<std::size_t>(np));
        kn.scal(1.0 / basis.H(c, hcol), v.data(), static_cast<std::size_t>(np));
        V.col(c) = v;
        ++c;
      }
    }
  }
  return V;
}

}  // namespace divfree
