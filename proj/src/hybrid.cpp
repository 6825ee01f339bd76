// Copyright (c) 2026 The divfree authors
// SPDX-License-Identifier: MIT

#include "divfree/hybrid.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "divfree/combinatorics.hpp"
#include "divfree/parallel.hpp"

namespace divfree {

namespace {

double dfac(int d) { return static_cast<double>(factorial(d)); }

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

enum class Problem { kHelmholtz, kLaplace, kPoisson };

// Face quadrature nodes of one local face mapped into the element reference
// simplex, via the shared FaceFrame parameterization.
Eigen::MatrixXd face_ref_points(const SimplicialMesh& mesh, const ElementGeometry& geom,
                                Eigen::Index face, const Eigen::MatrixXd& zeta) {
  const FaceFrame frame = face_frame(mesh, face);
  return physical_to_ref(geom, face_points_physical(frame, zeta));
}

// Component-major samples of a vector field at physical points.
Eigen::VectorXd stack_components(const Eigen::MatrixXd& vals) {
  Eigen::VectorXd out(vals.size());
  for (Eigen::Index i = 0; i < vals.cols(); ++i)
    out.segment(i * vals.rows(), vals.rows()) = vals.col(i);
  return out;
}

}  // namespace

FaceBasis build_face_basis(int k, int d) {
  if (d < 2) throw std::invalid_argument("hybrid: face basis needs d >= 2");
  FaceBasis fb;
  fb.ortho = build_orthopoly(k, d - 1);
  return fb;
}

Eigen::VectorXd local_alpha(const DivFreeElemBasis& eb,
                            const Eigen::Ref<const Eigen::VectorXd>& g_samples) {
  return project_l2(eb, g_samples);
}

Eigen::MatrixXd local_beta(const DivFreeElemBasis& eb, const FaceBasis& fb,
                           const ElementGeometry& geom, int local_face,
                           const Eigen::Ref<const Eigen::MatrixXd>& face_ref_pts) {
  const int d = eb.ref->dim;
  const Eigen::Index nq = fb.ortho.Q.rows();
  if (face_ref_pts.rows() != nq)
    throw std::invalid_argument("hybrid: face points do not match the face quadrature");

  const Eigen::MatrixXd vdf = evaluate_divfree(eb, face_ref_pts);  // d*nq x n
  Eigen::MatrixXd phin = Eigen::MatrixXd::Zero(nq, vdf.cols());
  for (int i = 0; i < d; ++i) phin.noalias() += geom.normals(local_face, i) * vdf.middleRows(i * nq, nq);

  const double fac =
      -geom.face_measures(local_face) * dfac(d - 1) / geom.volume;
  return fac * ((phin.array().colwise() * fb.ortho.quad.weights.array()).matrix().transpose() *
                fb.ortho.Q);
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> element_matrix_incremental(
    const LocalSolution& loc, const DivFreeRefBasis& ref, const FaceBasis& fb, int k_prime,
    ElementMatrixState& state) {
  const int d = ref.dim;
  const Eigen::Index m = fb.m_tilde();
  const Eigen::Index nfb = (d + 1) * m;
  if (k_prime > ref.degree || k_prime > fb.ortho.degree)
    throw std::invalid_argument("hybrid: degree above the local solve degree");
  if (state.degree > k_prime)
    throw std::invalid_argument("hybrid: incremental state already past requested degree");
  if (state.degree < 0) {
    state.gram = Eigen::MatrixXd::Zero(nfb, nfb);
    state.beta_alpha = Eigen::VectorXd::Zero(nfb);
  }

  for (int j = state.degree + 1; j <= k_prime; ++j) {
    const Eigen::Index lo = j == 0 ? 0 : ref.n_offsets[j - 1];
    const Eigen::Index width = ref.n_offsets[j] - lo;
    if (width == 0) continue;
    const auto rows = loc.beta.middleRows(lo, width);
    state.gram.noalias() += rows.transpose() * rows;
    state.beta_alpha.noalias() += rows.transpose() * loc.alpha.segment(lo, width);
  }
  state.degree = k_prime;

  const Eigen::Index mp = fb.m_tilde_at(k_prime);
  Eigen::MatrixXd A((d + 1) * mp, (d + 1) * mp);
  Eigen::VectorXd b((d + 1) * mp);
  for (int gf = 0; gf <= d; ++gf) {
    b.segment(gf * mp, mp) = -loc.volume * state.beta_alpha.segment(gf * m, mp);
    for (int gg = 0; gg <= d; ++gg)
      A.block(gf * mp, gg * mp, mp, mp) = loc.volume * state.gram.block(gf * m, gg * m, mp, mp);
  }
  return {std::move(A), std::move(b)};
}

GlobalSystem assemble_global(const SimplicialMesh& mesh,
                             const std::vector<ElementContrib>& contribs, int k_prime,
                             Eigen::Index m_prime,
                             const std::vector<Eigen::VectorXd>* boundary_coeffs) {
  const int d = mesh.dim;
  if (static_cast<Eigen::Index>(contribs.size()) != mesh.n_elems())
    throw std::invalid_argument("hybrid: one contribution per element required");

  GlobalSystem sys;
  sys.degree = k_prime;
  sys.block = m_prime;
  sys.n_blocks = mesh.n_interior;
  const Eigen::Index size = sys.n_blocks * m_prime;
  sys.b = Eigen::VectorXd::Zero(size);

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(mesh.n_elems()) * (d + 1) * (d + 1) * m_prime * m_prime);
  for (Eigen::Index e = 0; e < mesh.n_elems(); ++e) {
    const auto& ec = contribs[e];
    if (ec.A.rows() != (d + 1) * m_prime || ec.b.size() != (d + 1) * m_prime)
      throw std::invalid_argument("hybrid: contribution size mismatch at element " +
                                  std::to_string(e));
    for (int gf = 0; gf <= d; ++gf) {
      const MeshFace& face = mesh.faces[mesh.elem_faces(e, gf)];
      if (face.interior_index < 0) continue;
      const Eigen::Index row0 = static_cast<Eigen::Index>(face.interior_index) * m_prime;
      sys.b.segment(row0, m_prime) += ec.b.segment(gf * m_prime, m_prime);
      for (int gg = 0; gg <= d; ++gg) {
        const Eigen::Index gface = mesh.elem_faces(e, gg);
        const MeshFace& other = mesh.faces[gface];
        const auto blk = ec.A.block(gf * m_prime, gg * m_prime, m_prime, m_prime);
        if (other.interior_index >= 0) {
          const Eigen::Index col0 = static_cast<Eigen::Index>(other.interior_index) * m_prime;
          for (Eigen::Index i = 0; i < m_prime; ++i)
            for (Eigen::Index j = 0; j < m_prime; ++j)
              trips.emplace_back(row0 + i, col0 + j, blk(i, j));
        } else if (boundary_coeffs != nullptr) {
          const Eigen::VectorXd& cb = (*boundary_coeffs)[gface];
          if (cb.size() == 0) continue;
          if (cb.size() < m_prime)
            throw std::invalid_argument("hybrid: boundary coefficients shorter than face block");
          sys.b.segment(row0, m_prime) -= blk * cb.head(m_prime);
        }
      }
    }
  }
  sys.A.resize(size, size);
  sys.A.setFromTriplets(trips.begin(), trips.end());
  return sys;
}

Eigen::VectorXd solve_global(const GlobalSystem& sys) {
  const Eigen::Index size = sys.A.rows();
  if (size == 0) return Eigen::VectorXd();
  const double bnorm = sys.b.norm();
  if (bnorm == 0.0) return Eigen::VectorXd::Zero(size);

  if (size <= 2000) {
    Eigen::MatrixXd dense(sys.A);
    Eigen::LLT<Eigen::MatrixXd> llt(dense);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("hybrid: global matrix is not positive definite");
    return llt.solve(sys.b);
  }

  // Block-Jacobi preconditioned conjugate gradients.
  const Eigen::Index m = sys.block;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> blocks(sys.n_blocks);
  for (Eigen::Index f = 0; f < sys.n_blocks; ++f) {
    Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      const Eigen::Index col = f * m + j;
      for (Eigen::SparseMatrix<double>::InnerIterator it(sys.A, col); it; ++it) {
        const Eigen::Index r = it.row() - f * m;
        if (r >= 0 && r < m) diag(r, j) = it.value();
      }
    }
    blocks[f].compute(diag);
    if (blocks[f].info() != Eigen::Success)
      throw std::runtime_error("hybrid: global matrix is not positive definite");
  }
  auto precond = [&](const Eigen::VectorXd& r) {
    Eigen::VectorXd z(size);
    for (Eigen::Index f = 0; f < sys.n_blocks; ++f)
      z.segment(f * m, m) = blocks[f].solve(r.segment(f * m, m));
    return z;
  };

  Eigen::VectorXd x = Eigen::VectorXd::Zero(size);
  Eigen::VectorXd r = sys.b;
  Eigen::VectorXd z = precond(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  const double tol = 1e-13 * bnorm;
  const Eigen::Index max_iter = 10 * size;
  for (Eigen::Index it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd Ap = sys.A * p;
    const double pAp = p.dot(Ap);
    if (!(pAp > 0.0))
      throw std::runtime_error("hybrid: global matrix is not positive definite");
    const double a = rz / pAp;
    x += a * p;
    r -= a * Ap;
    if (r.norm() <= tol) return x;
    z = precond(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  throw std::runtime_error("hybrid: conjugate gradients did not converge");
}

Eigen::VectorXd recover_scalar(const DivFreeElemBasis& eb, const ElementGeometry& geom,
                               const FaceBasis& fb, const Eigen::MatrixXd& Ce,
                               const std::vector<Eigen::MatrixXd>& face_qvals,
                               const Eigen::VectorXd& u_divfree, const Eigen::VectorXd& u_poly,
                               const std::vector<Eigen::VectorXd>& face_mult,
                               const Eigen::VectorXd& g_samples, int k_prime) {
  const DivFreeRefBasis& ref = *eb.ref;
  const int d = ref.dim;
  const Eigen::Index p = ref.ortho.n_cols();
  const Eigen::Index pk = poly_space_dim(d, k_prime);
  const Eigen::Index pkm = poly_space_dim(d, k_prime - 1);
  if (pkm == 0) return Eigen::VectorXd();

  const Eigen::Index np = ref.ortho.Q.rows();
  const Eigen::VectorXd& w = ref.ortho.quad.weights;
  const double detE = geom.volume * dfac(d);

  // u_h in q-coefficients over the degree <= k' block.
  Eigen::VectorXd uq = Eigen::VectorXd::Zero(d * pk);
  const Eigen::Index nprime = u_divfree.size();
  for (int i = 0; i < d; ++i)
    uq.segment(i * pk, pk) = eb.Ne.block(i * p, 0, pk, nprime) * u_divfree;
  if (u_poly.size() != 0) {
    if (u_poly.size() != d * pk)
      throw std::invalid_argument("hybrid: polynomial part must cover degree k'");
    uq += u_poly;
  }

  // data_scale tracks the magnitudes feeding rhs before cancellation, so the
  // residual check below stays meaningful when the true multiplier is ~0.
  double data_scale = 0.0;
  Eigen::VectorXd rhs(d * pk);
  for (int i = 0; i < d; ++i) {
    Eigen::VectorXd diff = ref.ortho.Q.leftCols(pk) * uq.segment(i * pk, pk);
    data_scale = std::max(data_scale, detE * diff.cwiseAbs().maxCoeff());
    if (g_samples.size() != 0) {
      data_scale =
          std::max(data_scale, detE * g_samples.segment(i * np, np).cwiseAbs().maxCoeff());
      diff -= g_samples.segment(i * np, np);
    }
    rhs.segment(i * pk, pk) = detE * (ref.ortho.Q.leftCols(pk).transpose() * w.cwiseProduct(diff));
  }
  for (int g = 0; g <= d; ++g) {
    const Eigen::VectorXd& c = face_mult[g];
    if (c.size() == 0) continue;
    const Eigen::VectorXd lam_vals = fb.ortho.Q.leftCols(c.size()) * c;
    const Eigen::VectorXd moments =
        geom.face_measures(g) * dfac(d - 1) *
        (face_qvals[g].leftCols(pk).transpose() * fb.ortho.quad.weights.cwiseProduct(lam_vals));
    data_scale = std::max(data_scale, moments.cwiseAbs().maxCoeff());
    for (int i = 0; i < d; ++i) rhs.segment(i * pk, pk) += geom.normals(g, i) * moments;
  }

  Eigen::MatrixXd M(d * pk, pkm);
  for (int i = 0; i < d; ++i)
    M.middleRows(i * pk, pk) = geom.volume * Ce.block(0, i * p, pkm, pk).transpose();

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
  if (qr.rank() < pkm)
    throw std::runtime_error("hybrid: scalar recovery moment system is rank deficient");
  const Eigen::VectorXd lam = qr.solve(rhs);
  const double scale = std::max({rhs.cwiseAbs().maxCoeff(),
                                 M.cwiseAbs().maxCoeff() * lam.cwiseAbs().maxCoeff(),
                                 data_scale});
  const double resid = (M * lam - rhs).cwiseAbs().maxCoeff();
  if (scale > 0.0 && resid > 1e-10 * scale)
    throw std::runtime_error("hybrid: scalar recovery residual too large");
  return lam;
}

namespace {

struct ElementScratch {
  Eigen::VectorXd g_samples;               // component-major at element quad (Helmholtz)
  Eigen::VectorXd fhat;                    // q-moments of f (Poisson)
  std::vector<Eigen::MatrixXd> face_qvals; // per local face: n_q x p
  ElementMatrixState state;
  Eigen::VectorXd alpha_poly;              // Poisson: -Ne^T u_f at current degree
};

HybridSolution run_hybrid(const SimplicialMesh& mesh, int k, Problem prob, const VectorField* g,
                          const ScalarField* lam_d, const ScalarField* f,
                          const HybridOptions& opts) {
  const int d = mesh.dim;
  if (k < 0) throw std::invalid_argument("hybrid: degree must be >= 0");

  HybridSolution sol;
  sol.degree = k;
  sol.mesh = &mesh;

  double t0 = now_seconds();
  if (opts.ref) {
    if (opts.ref->dim != d || opts.ref->degree != k)
      throw std::invalid_argument("hybrid: provided basis does not match dim/degree");
    sol.ref = opts.ref;
  } else {
    sol.ref = std::make_shared<const DivFreeRefBasis>(build_divfree_ref(k, d));
  }
  sol.fbasis = build_face_basis(k, d);
  sol.t_ref = now_seconds() - t0;

  const DivFreeRefBasis& ref = *sol.ref;
  const Eigen::Index nel = mesh.n_elems();
  const Eigen::Index p = ref.ortho.n_cols();
  const Eigen::Index m = sol.fbasis.m_tilde();
  const Eigen::Index nfuncs = ref.n_funcs();
  const Eigen::MatrixXd& zeta = sol.fbasis.ortho.quad.points;

  sol.geoms.resize(nel);
  sol.elems.resize(nel);
  sol.locals.resize(nel);
  sol.constraints.resize(nel);
  std::vector<ElementScratch> scratch(nel);

  t0 = now_seconds();
  parallel_for(
      static_cast<std::size_t>(nel),
      [&](std::size_t e) {
        sol.geoms[e] = element_geometry(mesh, static_cast<Eigen::Index>(e));
        sol.elems[e] = build_divfree_elem(ref, sol.geoms[e].coords, static_cast<long>(e));
        sol.constraints[e] = elem_constraint(ref, sol.geoms[e].jacobian);

        LocalSolution& loc = sol.locals[e];
        loc.element = static_cast<long>(e);
        loc.volume = sol.geoms[e].volume;
        loc.beta.resize(nfuncs, (d + 1) * m);
        ElementScratch& sc = scratch[e];
        sc.face_qvals.resize(d + 1);
        for (int gg = 0; gg <= d; ++gg) {
          const Eigen::MatrixXd fpts =
              face_ref_points(mesh, sol.geoms[e], mesh.elem_faces(e, gg), zeta);
          sc.face_qvals[gg] = evaluate_orthopoly(ref.ortho, fpts);
          loc.beta.middleCols(gg * m, m) = local_beta(sol.elems[e], sol.fbasis, sol.geoms[e], gg, fpts);
        }

        const Eigen::MatrixXd xq = ref_to_physical(sol.geoms[e], ref.ortho.quad.points);
        if (prob == Problem::kHelmholtz) {
          sc.g_samples = stack_components((*g)(xq));
          loc.alpha = local_alpha(sol.elems[e], sc.g_samples);
        } else {
          loc.alpha = Eigen::VectorXd::Zero(nfuncs);
        }
        if (prob == Problem::kPoisson) {
          const Eigen::VectorXd fv = (*f)(xq);
          sc.fhat = ref.ortho.Q.transpose() * ref.ortho.quad.weights.cwiseProduct(fv);
        }
      },
      opts.threads);

  // Boundary multiplier data: face L2 projection of lambda_D (Laplace only).
  sol.boundary_coeffs.assign(mesh.faces.size(), Eigen::VectorXd());
  if (prob == Problem::kLaplace) {
    const SimplexRule brule = simplex_rule(k + 1, d - 1);
    const Eigen::MatrixXd bq = evaluate_orthopoly(sol.fbasis.ortho, brule.points);
    for (std::size_t fidx = 0; fidx < mesh.faces.size(); ++fidx) {
      if (mesh.faces[fidx].interior_index >= 0) continue;
      const FaceFrame frame = face_frame(mesh, static_cast<Eigen::Index>(fidx));
      const Eigen::VectorXd vals = (*lam_d)(face_points_physical(frame, brule.points));
      sol.boundary_coeffs[fidx] =
          dfac(d - 1) * (bq.transpose() * brule.weights.cwiseProduct(vals));
    }
  }
  sol.t_setup = now_seconds() - t0;

  sol.face_dofs.resize(k + 1);
  sol.u.assign(k + 1, std::vector<Eigen::VectorXd>(nel));
  sol.u_poly.assign(k + 1, std::vector<Eigen::VectorXd>(nel));
  sol.lambda.assign(k + 1, std::vector<Eigen::VectorXd>(nel));
  sol.t_degree.resize(k + 1);

  std::vector<ElementContrib> contribs(nel);
  for (int kp = 0; kp <= k; ++kp) {
    const Eigen::Index mp = sol.fbasis.m_tilde_at(kp);
    const Eigen::Index nprime = ref.n_offsets[kp];
    const Eigen::Index pk = poly_space_dim(d, kp);
    const Eigen::Index pkm = poly_space_dim(d, kp - 1);

    t0 = now_seconds();
    parallel_for(
        static_cast<std::size_t>(nel),
        [&](std::size_t e) {
          ElementScratch& sc = scratch[e];
          auto [Ae, be] =
              element_matrix_incremental(sol.locals[e], ref, sol.fbasis, kp, sc.state);
          if (prob == Problem::kPoisson) {
            // Particular solution u_f: divergence moments match f per degree.
            Eigen::VectorXd usub = Eigen::VectorXd::Zero(d * pk);
            if (pkm > 0) {
              Eigen::MatrixXd csub(pkm, d * pk);
              for (int i = 0; i < d; ++i)
                csub.middleCols(i * pk, pk) = sol.constraints[e].block(0, i * p, pkm, pk);
              Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(csub);
              if (cod.rank() < pkm)
                throw std::runtime_error("hybrid: local saddle solve is rank deficient");
              usub = cod.solve(dfac(d) * sc.fhat.head(pkm));
            }
            sol.u_poly[kp][e] = usub;
            Eigen::MatrixXd nsub(d * pk, nprime);
            for (int i = 0; i < d; ++i)
              nsub.middleRows(i * pk, pk) = sol.elems[e].Ne.block(i * p, 0, pk, nprime);
            sc.alpha_poly = -(nsub.transpose() * usub);
            // b = face flux moments of u_f minus volume * beta^T alpha.
            be = -sol.geoms[e].volume *
                 (sol.locals[e].beta.topRows(nprime).transpose() * sc.alpha_poly);
            Eigen::VectorXd bpacked((d + 1) * mp);
            for (int gg = 0; gg <= d; ++gg) {
              Eigen::VectorXd ufn = Eigen::VectorXd::Zero(zeta.rows());
              for (int i = 0; i < d; ++i)
                ufn.noalias() += sol.geoms[e].normals(gg, i) *
                                 (sc.face_qvals[gg].leftCols(pk) * usub.segment(i * pk, pk));
              const Eigen::VectorXd fl =
                  sol.geoms[e].face_measures(gg) * dfac(d - 1) *
                  (sol.fbasis.ortho.Q.leftCols(mp).transpose() *
                   sol.fbasis.ortho.quad.weights.cwiseProduct(ufn));
              bpacked.segment(gg * mp, mp) = fl + be.segment(gg * m, mp);
            }
            contribs[e] = {std::move(Ae), std::move(bpacked)};
          } else {
            contribs[e] = {std::move(Ae), std::move(be)};
          }
        },
        opts.threads);

    const GlobalSystem sys = assemble_global(mesh, contribs, kp, mp, &sol.boundary_coeffs);
    sol.t_degree[kp].assemble = now_seconds() - t0;

    t0 = now_seconds();
    const Eigen::VectorXd c = solve_global(sys);
    sol.face_dofs[kp] = c;
    sol.t_degree[kp].solve = now_seconds() - t0;

    t0 = now_seconds();
    parallel_for(
        static_cast<std::size_t>(nel),
        [&](std::size_t e) {
          ElementScratch& sc = scratch[e];
          std::vector<Eigen::VectorXd> face_mult(d + 1);
          for (int gg = 0; gg <= d; ++gg) {
            const MeshFace& face = mesh.faces[mesh.elem_faces(e, gg)];
            if (face.interior_index >= 0)
              face_mult[gg] = c.segment(static_cast<Eigen::Index>(face.interior_index) * mp, mp);
            else if (sol.boundary_coeffs[mesh.elem_faces(e, gg)].size() != 0)
              face_mult[gg] = sol.boundary_coeffs[mesh.elem_faces(e, gg)].head(mp);
            else
              face_mult[gg] = Eigen::VectorXd::Zero(mp);
          }
          Eigen::VectorXd u0 = prob == Problem::kPoisson
                                   ? sc.alpha_poly
                                   : Eigen::VectorXd(sol.locals[e].alpha.head(nprime));
          for (int gg = 0; gg <= d; ++gg)
            u0.noalias() +=
                sol.locals[e].beta.block(0, gg * m, nprime, mp) * face_mult[gg];
          sol.u[kp][e] = u0;

          if (opts.recover && kp >= 1) {
            sol.lambda[kp][e] = recover_scalar(
                sol.elems[e], sol.geoms[e], sol.fbasis, sol.constraints[e], sc.face_qvals, u0,
                sol.u_poly[kp][e], face_mult,
                prob == Problem::kHelmholtz ? sc.g_samples : Eigen::VectorXd(), kp);
          }
        },
        opts.threads);
    sol.t_degree[kp].recover = now_seconds() - t0;
  }
  return sol;
}

}  // namespace

HybridSolution driver_helmholtz(const SimplicialMesh& mesh, const VectorField& g, int k,
                                const HybridOptions& opts) {
  return run_hybrid(mesh, k, Problem::kHelmholtz, &g, nullptr, nullptr, opts);
}

HybridSolution driver_laplace(const SimplicialMesh& mesh, const ScalarField& lambda_D, int k,
                              const HybridOptions& opts) {
  return run_hybrid(mesh, k, Problem::kLaplace, nullptr, &lambda_D, nullptr, opts);
}

HybridSolution driver_poisson(const SimplicialMesh& mesh, const ScalarField& f, int k,
                              const HybridOptions& opts) {
  return run_hybrid(mesh, k, Problem::kPoisson, nullptr, nullptr, &f, opts);
}

Eigen::MatrixXd ref_to_physical(const ElementGeometry& geom,
                                const Eigen::Ref<const Eigen::MatrixXd>& ref_pts) {
  Eigen::MatrixXd x = ref_pts * geom.edge.transpose();
  x.rowwise() += geom.coords.row(0);
  return x;
}

Eigen::MatrixXd eval_u(const HybridSolution& sol, Eigen::Index e, int k_prime,
                       const Eigen::Ref<const Eigen::MatrixXd>& ref_pts) {
  const int d = sol.mesh->dim;
  const Eigen::Index np = ref_pts.rows();
  const Eigen::Index nprime = sol.ref->n_offsets[k_prime];
  const Eigen::MatrixXd W = evaluate_divfree(sol.elems[e], ref_pts);
  Eigen::MatrixXd vals(np, d);
  for (int i = 0; i < d; ++i)
    vals.col(i) = W.block(i * np, 0, np, nprime) * sol.u[k_prime][e];
  const Eigen::VectorXd& upoly = sol.u_poly[k_prime][e];
  if (upoly.size() != 0) {
    const Eigen::Index pk = poly_space_dim(d, k_prime);
    const Eigen::MatrixXd V = evaluate_orthopoly(sol.ref->ortho, ref_pts);
    for (int i = 0; i < d; ++i)
      vals.col(i) += V.leftCols(pk) * upoly.segment(i * pk, pk);
  }
  return vals;
}

Eigen::VectorXd eval_lambda(const HybridSolution& sol, Eigen::Index e, int k_prime,
                            const Eigen::Ref<const Eigen::MatrixXd>& ref_pts) {
  const Eigen::VectorXd& coef = sol.lambda[k_prime][e];
  if (coef.size() == 0) return Eigen::VectorXd::Zero(ref_pts.rows());
  const Eigen::MatrixXd V = evaluate_orthopoly(sol.ref->ortho, ref_pts);
  return V.leftCols(coef.size()) * coef;
}

Eigen::MatrixXd u_error_table(const HybridSolution& sol, const VectorField& exact,
                              int pts_per_axis) {
  const int d = sol.mesh->dim;
  const int k = sol.degree;
  const Eigen::MatrixXd grid = simplex_grid(pts_per_axis, d);
  const Eigen::Index np = grid.rows();
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(k + 1, d);
  for (Eigen::Index e = 0; e < sol.mesh->n_elems(); ++e) {
    const Eigen::MatrixXd exact_vals = exact(ref_to_physical(sol.geoms[e], grid));
    const Eigen::MatrixXd W = evaluate_divfree(sol.elems[e], grid);
    const bool poly = sol.u_poly[k][e].size() != 0;
    Eigen::MatrixXd V;
    if (poly) V = evaluate_orthopoly(sol.ref->ortho, grid);
    for (int kp = 0; kp <= k; ++kp) {
      const Eigen::Index nprime = sol.ref->n_offsets[kp];
      const Eigen::Index pk = poly_space_dim(d, kp);
      for (int i = 0; i < d; ++i) {
        Eigen::VectorXd vals = W.block(i * np, 0, np, nprime) * sol.u[kp][e];
        if (poly) vals += V.leftCols(pk) * sol.u_poly[kp][e].segment(i * pk, pk);
        table(kp, i) =
            std::max(table(kp, i), (vals - exact_vals.col(i)).cwiseAbs().maxCoeff());
      }
    }
  }
  return table;
}

Eigen::VectorXd lambda_error_table(const HybridSolution& sol, const ScalarField& exact,
                                   int pts_per_axis) {
  const int d = sol.mesh->dim;
  const int k = sol.degree;
  const Eigen::MatrixXd grid = simplex_grid(pts_per_axis, d);
  Eigen::VectorXd table = Eigen::VectorXd::Zero(k + 1);
  for (Eigen::Index e = 0; e < sol.mesh->n_elems(); ++e) {
    const Eigen::VectorXd exact_vals = exact(ref_to_physical(sol.geoms[e], grid));
    const Eigen::MatrixXd V = evaluate_orthopoly(sol.ref->ortho, grid);
    for (int kp = 0; kp <= k; ++kp) {
      const Eigen::VectorXd& coef = sol.lambda[kp][e];
      Eigen::VectorXd vals = Eigen::VectorXd::Zero(grid.rows());
      if (coef.size() != 0) vals = V.leftCols(coef.size()) * coef;
      table(kp) = std::max(table(kp), (vals - exact_vals).cwiseAbs().maxCoeff());
    }
  }
  return table;
}

double max_flux_jump(const HybridSolution& sol, int k_prime) {
  const SimplicialMesh& mesh = *sol.mesh;
  const int d = mesh.dim;
  const Eigen::Index mp = sol.fbasis.m_tilde_at(k_prime);
  const Eigen::MatrixXd& zeta = sol.fbasis.ortho.quad.points;
  const Eigen::Index nq = zeta.rows();
  double worst = 0.0;
  for (std::size_t fidx = 0; fidx < mesh.faces.size(); ++fidx) {
    const MeshFace& face = mesh.faces[fidx];
    if (face.interior_index < 0) continue;
    Eigen::VectorXd jump = Eigen::VectorXd::Zero(nq);
    for (int side = 0; side < 2; ++side) {
      const Eigen::Index e = side == 0 ? face.elem_pos : face.elem_neg;
      const int lf = side == 0 ? face.local_pos : face.local_neg;
      const Eigen::MatrixXd fpts =
          face_ref_points(mesh, sol.geoms[e], static_cast<Eigen::Index>(fidx), zeta);
      const Eigen::MatrixXd uvals = eval_u(sol, e, k_prime, fpts);
      for (int i = 0; i < d; ++i)
        jump.noalias() += sol.geoms[e].normals(lf, i) * uvals.col(i);
    }
    const Eigen::VectorXd moments =
        face.measure * dfac(d - 1) *
        (sol.fbasis.ortho.Q.leftCols(mp).transpose() *
         sol.fbasis.ortho.quad.weights.cwiseProduct(jump));
    worst = std::max(worst, moments.cwiseAbs().maxCoeff());
  }
  return worst;
}

double max_divergence_moment_gap(const HybridSolution& sol, const ScalarField& f, int k_prime) {
  const SimplicialMesh& mesh = *sol.mesh;
  const int d = mesh.dim;
  const DivFreeRefBasis& ref = *sol.ref;
  const Eigen::Index p = ref.ortho.n_cols();
  const Eigen::Index pk = poly_space_dim(d, k_prime);
  const Eigen::Index pkm = poly_space_dim(d, k_prime - 1);
  if (pkm == 0) return 0.0;
  double worst = 0.0;
  for (Eigen::Index e = 0; e < mesh.n_elems(); ++e) {
    const Eigen::Index nprime = ref.n_offsets[k_prime];
    Eigen::VectorXd uq = Eigen::VectorXd::Zero(d * pk);
    for (int i = 0; i < d; ++i)
      uq.segment(i * pk, pk) = sol.elems[e].Ne.block(i * p, 0, pk, nprime) * sol.u[k_prime][e];
    if (sol.u_poly[k_prime][e].size() != 0) uq += sol.u_poly[k_prime][e];
    Eigen::VectorXd moments = Eigen::VectorXd::Zero(pkm);
    for (int i = 0; i < d; ++i)
      moments.noalias() +=
          sol.constraints[e].block(0, i * p, pkm, pk) * uq.segment(i * pk, pk);
    moments *= sol.geoms[e].volume;

    const Eigen::MatrixXd xq = ref_to_physical(sol.geoms[e], ref.ortho.quad.points);
    const Eigen::VectorXd fv = f(xq);
    const Eigen::VectorXd fmom = sol.geoms[e].volume * dfac(d) *
                                 (ref.ortho.Q.leftCols(pkm).transpose() *
                                  ref.ortho.quad.weights.cwiseProduct(fv));
    worst = std::max(worst, (moments - fmom).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace divfree
