// Copyright (c) 2026 The divfree authors
// SPDX-License-Identifier: MIT

#include "divfree/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

#include "divfree/combinatorics.hpp"

namespace divfree {

GaussRule1d gauss_jacobi_01(int n, int alpha) {
  if (n < 1) throw std::invalid_argument("gauss_jacobi_01: n must be >= 1");
  if (alpha < 0) throw std::invalid_argument("gauss_jacobi_01: alpha must be >= 0");

  // Three-term recurrence of monic Jacobi(alpha, 0) polynomials on [-1,1].
  const double a = alpha;
  Eigen::VectorXd diag(n), sub(std::max(n - 1, 0));
  diag[0] = -a / (a + 2.0);
  for (int j = 1; j < n; ++j) {
    const double t = 2.0 * j + a;
    diag[j] = -a * a / (t * (t + 2.0));
    sub[j - 1] = 2.0 * j * (j + a) / (t * std::sqrt(t * t - 1.0));
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("gauss_jacobi_01: eigen solve failed for n=" + std::to_string(n) +
                             " alpha=" + std::to_string(alpha));

  // Map [-1,1] -> [0,1]; total weight 2^(a+1)/(a+1) rescales by (1/2)^(a+1).
  GaussRule1d r;
  r.alpha = alpha;
  r.nodes = (es.eigenvalues().array() + 1.0) / 2.0;
  const double mu0 = std::pow(2.0, a + 1.0) / (a + 1.0);
  const double scale = mu0 * std::pow(0.5, a + 1.0);
  r.weights = scale * es.eigenvectors().row(0).transpose().array().square();
  return r;
}

Eigen::MatrixXd duffy_map(const Eigen::MatrixXd& cube_pts) {
  const Eigen::Index np = cube_pts.rows(), d = cube_pts.cols();
  Eigen::MatrixXd x(np, d);
  for (Eigen::Index q = 0; q < np; ++q) {
    double shrink = 1.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      x(q, j) = cube_pts(q, j) * shrink;
      shrink *= 1.0 - cube_pts(q, j);
    }
  }
  return x;
}

namespace {

SimplexRule build_simplex_rule(int k, int d) {
  const Eigen::Index n1 = k + 1;
  Eigen::Index np = 1;
  for (int j = 0; j < d; ++j) np *= n1;

  std::vector<GaussRule1d> rules(d);
  for (int j = 1; j <= d; ++j) rules[j - 1] = gauss_jacobi_01(k + 1, d - j);

  SimplexRule r;
  r.dim = d;
  r.degree = k;
  r.cube_points.resize(np, d);
  r.weights.resize(np);
  // Tensor ordering with dimension 1 fastest.
  for (Eigen::Index q = 0; q < np; ++q) {
    Eigen::Index rem = q;
    double w = 1.0;
    for (int j = 0; j < d; ++j) {
      const Eigen::Index i = rem % n1;
      rem /= n1;
      r.cube_points(q, j) = rules[j].nodes[i];
      w *= rules[j].weights[i];
    }
    r.weights[q] = w;
  }
  r.points = duffy_map(r.cube_points);
  return r;
}

std::map<std::pair<int, int>, SimplexRule> g_rule_cache;
std::mutex g_rule_mutex;

}  // namespace

SimplexRule simplex_rule(int k, int d) {
  if (k < 0 || d < 1) throw std::invalid_argument("simplex_rule: need k >= 0, d >= 1");
  std::lock_guard<std::mutex> lock(g_rule_mutex);
  auto it = g_rule_cache.find({k, d});
  if (it == g_rule_cache.end())
    it = g_rule_cache.emplace(std::make_pair(k, d), build_simplex_rule(k, d)).first;
  return it->second;
}

Eigen::MatrixXd simplex_grid(int n, int d) {
  if (n < 2 || d < 1) throw std::invalid_argument("simplex_grid: need n >= 2, d >= 1");
  Eigen::Index np = 1;
  for (int j = 0; j < d; ++j) np *= n;
  const Eigen::VectorXd line = Eigen::VectorXd::LinSpaced(n, 0.0, 1.0);
  Eigen::MatrixXd cube(np, d);
  for (Eigen::Index q = 0; q < np; ++q) {
    Eigen::Index rem = q;
    for (int j = 0; j < d; ++j) {
      cube(q, j) = line[rem % n];
      rem /= n;
    }
  }
  return duffy_map(cube);
}

}  // namespace divfree
