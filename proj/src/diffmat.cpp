// Copyright (c) 2026 The divfree authors
// SPDX-License-Identifier: MIT

#include "divfree/diffmat.hpp"

#include <stdexcept>
#include <string>

namespace divfree {

Eigen::VectorXd barycentric_weights(const Eigen::VectorXd& nodes) {
  const Eigen::Index n = nodes.size();
  Eigen::VectorXd lam(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double prod = 1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double diff = nodes[i] - nodes[j];
      if (diff == 0.0) throw std::invalid_argument("barycentric_weights: duplicate nodes");
      prod *= diff;
    }
    lam[i] = 1.0 / prod;
  }
  return lam;
}

Eigen::MatrixXd diff_matrix_1d(const Eigen::VectorXd& nodes) {
  const Eigen::Index n = nodes.size();
  const Eigen::VectorXd lam = barycentric_weights(nodes);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double rowsum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      D(i, j) = (lam[j] / lam[i]) / (nodes[i] - nodes[j]);
      rowsum += D(i, j);
    }
    D(i, i) = -rowsum;
  }
  return D;
}

DerivativeMatrices::DerivativeMatrices(const SimplexRule& quad, Eigen::Index dense_row_limit)
    : dim_(quad.dim),
      degree_(quad.degree),
      rows_(quad.points.rows()),
      n1_(quad.degree + 1),
      dense_row_limit_(dense_row_limit) {
  const int d = dim_;
  if ((quad.cube_points.array() <= 0.0).any() || (quad.cube_points.array() >= 1.0).any())
    throw std::invalid_argument("DerivativeMatrices: quadrature points must be interior");

  dz_.reserve(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    // All points share the same per-axis 1-D node set; read it off the grid.
    Eigen::VectorXd nodes(n1_);
    Eigen::Index stride = 1;
    for (int m = 0; m < j; ++m) stride *= n1_;
    for (Eigen::Index t = 0; t < n1_; ++t) nodes[t] = quad.cube_points(t * stride, j);
    dz_.push_back(diff_matrix_1d(nodes));
  }

  own_.resize(rows_, d);
  carry_.resize(rows_, d);
  for (Eigen::Index q = 0; q < rows_; ++q) {
    double s = 1.0;  // prod_{m<j}(1 - z_m)
    for (int j = 0; j < d; ++j) {
      const double z = quad.cube_points(q, j);
      own_(q, j) = 1.0 / s;
      carry_(q, j) = z / s;
      s *= 1.0 - z;
    }
  }
  dense_.resize(static_cast<std::size_t>(d));
}

Eigen::MatrixXd DerivativeMatrices::apply_axis(int j, const Eigen::Ref<const Eigen::MatrixXd>& in) const {
  const Eigen::Index ncols = in.cols(), n1 = n1_;
  Eigen::Index stride = 1;
  for (int m = 0; m < j; ++m) stride *= n1;
  const Eigen::Index block = stride * n1;
  const Eigen::MatrixXd& D = dz_[static_cast<std::size_t>(j)];

  Eigen::MatrixXd out(rows_, ncols);
  Eigen::VectorXd line(n1), dline(n1);
  for (Eigen::Index c = 0; c < ncols; ++c) {
    for (Eigen::Index b = 0; b < rows_; b += block) {
      for (Eigen::Index o = 0; o < stride; ++o) {
        const Eigen::Index base = b + o;
        for (Eigen::Index t = 0; t < n1; ++t) line[t] = in(base + t * stride, c);
        dline.noalias() = D * line;
        for (Eigen::Index t = 0; t < n1; ++t) out(base + t * stride, c) = dline[t];
      }
    }
  }
  return out;
}

Eigen::MatrixXd DerivativeMatrices::apply(int i, const Eigen::Ref<const Eigen::MatrixXd>& in) const {
  if (i < 0 || i >= dim_) throw std::out_of_range("DerivativeMatrices::apply: bad direction");
  if (in.rows() != rows_) throw std::invalid_argument("DerivativeMatrices::apply: row mismatch");
  // DX_i = diag(own_i) DZ_i + sum_{j>i} diag(carry_j) DZ_j
  Eigen::MatrixXd out = own_.col(i).asDiagonal() * apply_axis(i, in);
  for (int j = i + 1; j < dim_; ++j)
    out.noalias() += carry_.col(j).asDiagonal() * apply_axis(j, in);
  return out;
}

const Eigen::MatrixXd& DerivativeMatrices::dense(int i) const {
  if (i < 0 || i >= dim_) throw std::out_of_range("DerivativeMatrices::dense: bad direction");
  if (rows_ > dense_row_limit_)
    throw std::runtime_error("DerivativeMatrices::dense: " + std::to_string(rows_) +
                             " rows exceed the dense limit; use apply()");
  std::lock_guard<std::mutex> lock(dense_mutex_);
  auto& slot = dense_[static_cast<std::size_t>(i)];
  if (!slot) {
    auto M = std::make_unique<Eigen::MatrixXd>(Eigen::MatrixXd::Zero(rows_, rows_));
    for (int j = i; j < dim_; ++j) {
      const Eigen::MatrixXd& D = dz_[static_cast<std::size_t>(j)];
      Eigen::Index stride = 1;
      for (int m = 0; m < j; ++m) stride *= n1_;
      for (Eigen::Index r = 0; r < rows_; ++r) {
        const double fac = (j == i) ? own_(r, i) : carry_(r, j);
        const Eigen::Index rj = (r / stride) % n1_;
        const Eigen::Index base = r - rj * stride;
        for (Eigen::Index t = 0; t < n1_; ++t) (*M)(r, base + t * stride) += fac * D(rj, t);
      }
    }
    slot = std::move(M);
  }
  return *slot;
}

}  // namespace divfree
