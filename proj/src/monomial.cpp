// Copyright (c) 2026 The divfree authors
// SPDX-License-Identifier: MIT

#include "divfree/monomial.hpp"

#include <map>
#include <numeric>
#include <stdexcept>

#include "divfree/combinatorics.hpp"

namespace divfree {

namespace {

double pow_int(double x, int e) {
  double r = 1.0;
  for (int t = 0; t < e; ++t) r *= x;
  return r;
}

void add_rational(std::int64_t& num, std::int64_t& den, std::int64_t n2, std::int64_t d2) {
  num = num * d2 + n2 * den;
  den *= d2;
  if (num == 0) {
    den = 1;
    return;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  num /= g;
  den /= g;
}

}  // namespace

MonomialDivFreeBasis build_monomial_divfree(int k, int d) {
  if (d < 1 || k < 0) throw std::invalid_argument("monomial: need d >= 1, k >= 0");
  MonomialDivFreeBasis basis;
  basis.dim = d;
  basis.degree = k;
  basis.n_offsets.resize(k + 1);
  const auto exps = monomial_exponents(d, k);

  for (int j = 0; j <= k; ++j) {
    const Eigen::Index lo = poly_space_dim(d, j - 1);
    const Eigen::Index hi = poly_space_dim(d, j);
    // Monomials with no dependence on x_i stay divergence-free on e_i.
    for (int i = 0; i < d; ++i) {
      for (Eigen::Index t = lo; t < hi; ++t) {
        if (exps[t][i] != 0) continue;
        MonomialTerm term;
        term.component = i;
        term.exps = exps[t];
        basis.funcs.push_back({term});
      }
    }
    // Pairwise cancellations: div(x^{b+e_0} e_0 / (b_0+1)) = x^b for any b of
    // degree j-1, matched against the same with component i.
    if (j >= 1) {
      const Eigen::Index blo = poly_space_dim(d, j - 2);
      const Eigen::Index bhi = poly_space_dim(d, j - 1);
      for (Eigen::Index t = blo; t < bhi; ++t) {
        const auto& b = exps[t];
        for (int i = 1; i < d; ++i) {
          MonomialTerm t0;
          t0.component = 0;
          t0.exps = b;
          ++t0.exps[0];
          t0.num = 1;
          t0.den = b[0] + 1;
          MonomialTerm ti;
          ti.component = i;
          ti.exps = b;
          ++ti.exps[i];
          ti.num = -1;
          ti.den = b[i] + 1;
          basis.funcs.push_back({t0, ti});
        }
      }
    }
    basis.n_offsets[j] = static_cast<Eigen::Index>(basis.funcs.size());
    if (basis.n_offsets[j] != divfree_space_dim(d, j))
      throw std::runtime_error("monomial: count mismatch at degree " + std::to_string(j));
  }
  return basis;
}

Eigen::MatrixXd evaluate_monomial_divfree(const MonomialDivFreeBasis& basis,
                                          const Eigen::Ref<const Eigen::MatrixXd>& pts) {
  const int d = basis.dim;
  const Eigen::Index np = pts.rows();
  const Eigen::Index n = static_cast<Eigen::Index>(basis.funcs.size());
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(d * np, n);
  for (Eigen::Index ell = 0; ell < n; ++ell) {
    for (const auto& term : basis.funcs[ell]) {
      const double c = static_cast<double>(term.num) / static_cast<double>(term.den);
      for (Eigen::Index q = 0; q < np; ++q) {
        double v = c;
        for (int i = 0; i < d; ++i) v *= pow_int(pts(q, i), term.exps[i]);
        W(term.component * np + q, ell) += v;
      }
    }
  }
  return W;
}

std::vector<MonomialTerm> symbolic_divergence(const MonomialDivFreeBasis& basis,
                                              Eigen::Index ell) {
  std::map<std::vector<int>, std::pair<std::int64_t, std::int64_t>> acc;
  for (const auto& term : basis.funcs.at(static_cast<std::size_t>(ell))) {
    const int a = term.exps[term.component];
    if (a == 0) continue;
    std::vector<int> e = term.exps;
    --e[term.component];
    auto& slot = acc.try_emplace(std::move(e), 0, 1).first->second;
    add_rational(slot.first, slot.second, term.num * a, term.den);
  }
  std::vector<MonomialTerm> out;
  for (const auto& [e, c] : acc) {
    if (c.first == 0) continue;
    MonomialTerm t;
    t.component = 0;
    t.exps = e;
    t.num = c.first;
    t.den = c.second;
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace divfree
