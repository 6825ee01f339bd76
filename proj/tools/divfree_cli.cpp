// Copyright (c) 2026 The divfree authors
// SPDX-License-Identifier: MIT

#include <CLI11.hpp>
#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "divfree/combinatorics.hpp"
#include "divfree/divfree_basis.hpp"
#include "divfree/hybrid.hpp"
#include "divfree/io.hpp"
#include "divfree/mesh.hpp"
#include "divfree/monomial.hpp"
#include "divfree/quadrature.hpp"

namespace {

namespace fs = std::filesystem;
using divfree::ScalarField;
using divfree::VectorField;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kPi = std::numbers::pi;

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

// ---------------------------------------------------------------- test fields

MatrixXd field_projection(const MatrixXd& x) {
  MatrixXd g(x.rows(), 2);
  g.col(0) = (kPi * x.col(0)).array().sin() * (kPi * x.col(1)).array().cos();
  g.col(1) = -(kPi * x.col(0)).array().cos() * (kPi * x.col(1)).array().sin();
  return g;
}

MatrixXd field_conditioning(const MatrixXd& x) {
  MatrixXd g(x.rows(), 2);
  g.col(0) = (4 * kPi * x.col(0)).array().sin() * (4 * kPi * x.col(1)).array().cos();
  g.col(1) = -(4 * kPi * x.col(0)).array().cos() * (4 * kPi * x.col(1)).array().sin();
  return g;
}

// Rotational part of the square-mesh Helmholtz data; the full data g adds a
// gradient that the projection must remove.
MatrixXd field_square_u(const MatrixXd& x) {
  MatrixXd u(x.rows(), 2);
  u.col(0) = (2 * kPi * x.col(0)).array().cos() * (2 * kPi * x.col(1)).array().sin();
  u.col(1) = -(2 * kPi * x.col(0)).array().sin() * (2 * kPi * x.col(1)).array().cos();
  return u;
}

MatrixXd field_square_g(const MatrixXd& x) {
  MatrixXd g(x.rows(), 2);
  g.col(0) = 1.1 * ((2 * kPi * x.col(0)).array().cos() * (2 * kPi * x.col(1)).array().sin());
  g.col(1) = -0.9 * ((2 * kPi * x.col(0)).array().sin() * (2 * kPi * x.col(1)).array().cos());
  return g;
}

VectorXd field_square_lambda(const MatrixXd& x) {
  return (0.1 / (2 * kPi)) *
         ((2 * kPi * x.col(0)).array().sin() * (2 * kPi * x.col(1)).array().sin()).matrix();
}

// Divergence-free 3-D data; its Helmholtz projection is the data itself.
MatrixXd field_3d_u(const MatrixXd& x) {
  MatrixXd u(x.rows(), 3);
  const auto cx = (kPi * x.col(0)).array().cos();
  const auto sx = (kPi * x.col(0)).array().sin();
  const auto cy = (kPi * x.col(1)).array().cos();
  const auto sy = (kPi * x.col(1)).array().sin();
  const auto cz = (kPi * x.col(2)).array().cos();
  const auto sz = (kPi * x.col(2)).array().sin();
  u.col(0) = sx * cy * cz;
  u.col(1) = -0.5 * (cx * sy * cz);
  u.col(2) = -0.5 * (cx * cy * sz);
  return u;
}

VectorXd field_laplace_lambda(const MatrixXd& x) {
  return ((2 * kPi * x.col(0)).array().sin() * (-2 * kPi * x.col(1)).array().exp()).matrix();
}

MatrixXd field_laplace_u(const MatrixXd& x) {
  MatrixXd u(x.rows(), 2);
  const auto e = (-2 * kPi * x.col(1)).array().exp();
  u.col(0) = -2 * kPi * ((2 * kPi * x.col(0)).array().cos() * e);
  u.col(1) = 2 * kPi * ((2 * kPi * x.col(0)).array().sin() * e);
  return u;
}

VectorXd field_poisson_f(const MatrixXd& x) {
  return 8 * kPi * kPi *
         ((2 * kPi * x.col(0)).array().sin() * (2 * kPi * x.col(1)).array().sin()).matrix();
}

VectorXd field_poisson_lambda(const MatrixXd& x) {
  return ((2 * kPi * x.col(0)).array().sin() * (2 * kPi * x.col(1)).array().sin()).matrix();
}

MatrixXd field_poisson_u(const MatrixXd& x) {
  MatrixXd u(x.rows(), 2);
  u.col(0) = -2 * kPi * ((2 * kPi * x.col(0)).array().cos() * (2 * kPi * x.col(1)).array().sin());
  u.col(1) = -2 * kPi * ((2 * kPi * x.col(0)).array().sin() * (2 * kPi * x.col(1)).array().cos());
  return u;
}

VectorXd field_corner_lambda(const MatrixXd& x) { return x.col(0).array().square().matrix(); }

// ------------------------------------------------------------------- helpers

divfree::SimplicialMesh parse_mesh_spec(const std::string& spec) {
  if (spec.rfind("square", 0) == 0 && spec.size() > 6 &&
      spec.find_first_not_of("0123456789", 6) == std::string::npos)
    return divfree::gen_uniform_square(std::stoi(spec.substr(6)));
  if (spec == "lshape" || spec.rfind("lshape:", 0) == 0) {
    int levels = 12;
    double ratio = 0.5;
    if (spec.size() > 7) {
      const std::string args = spec.substr(7);
      const auto comma = args.find(',');
      levels = std::stoi(args.substr(0, comma));
      if (comma != std::string::npos) ratio = std::stod(args.substr(comma + 1));
    }
    return divfree::gen_lshape_graded(levels, ratio);
  }
  return divfree::load_mesh(spec);
}

std::shared_ptr<const divfree::DivFreeRefBasis> obtain_ref(int k, int d,
                                                           const std::string& cache) {
  return std::make_shared<const divfree::DivFreeRefBasis>(
      divfree::load_or_build_ref(k, d, cache));
}

MatrixXd elem_physical(const divfree::DivFreeElemBasis& eb, const MatrixXd& coords,
                       const MatrixXd& ref_pts) {
  MatrixXd x = ref_pts * eb.edge.transpose();
  x.rowwise() += coords.row(0);
  return x;
}

VectorXd stack_components(const MatrixXd& vals) {
  VectorXd out(vals.size());
  for (Eigen::Index i = 0; i < vals.cols(); ++i)
    out.segment(i * vals.rows(), vals.rows()) = vals.col(i);
  return out;
}

// ---------------------------------------------------------------- experiments

void run_projection(int k, const fs::path& out_dir, const std::string& cache) {
  const int kk = k < 0 ? 20 : k;
  const auto ref = obtain_ref(kk, 2, cache);

  MatrixXd coords(3, 2);
  coords << 0.0, 0.0, 1.0, 0.8, 0.1, 1.0;
  const auto eb = divfree::build_divfree_elem(*ref, coords);
  const MatrixXd Ce = divfree::elem_constraint(*ref, eb.jacobian);

  const MatrixXd xq = elem_physical(eb, coords, ref->ortho.quad.points);
  const VectorXd coef = divfree::project_l2(eb, stack_components(field_projection(xq)));

  const MatrixXd grid = divfree::simplex_grid(50, 2);
  const Eigen::Index ng = grid.rows();
  const MatrixXd W = divfree::evaluate_divfree(eb, grid);
  const MatrixXd exact = field_projection(elem_physical(eb, coords, grid));

  divfree::CsvTable table;
  table.schema = "projection-v1";
  table.columns = {"degree", "n_funcs", "err_x", "err_y", "constraint"};
  for (int j = 0; j <= kk; ++j) {
    const Eigen::Index n = ref->n_offsets[j];
    const VectorXd c = coef.head(n);
    double err[2];
    for (int i = 0; i < 2; ++i)
      err[i] = (W.block(i * ng, 0, ng, n) * c - exact.col(i)).cwiseAbs().maxCoeff();
    const VectorXd uq = eb.Ne.leftCols(n) * c;
    const double constraint = eb.volume * (Ce * uq).cwiseAbs().maxCoeff();
    table.rows.push_back({double(j), double(n), err[0], err[1], constraint});
  }
  divfree::write_csv(out_dir / "projection.csv", table);
  std::cout << "wrote " << (out_dir / "projection.csv").string() << "\n";
}

void run_conditioning(int k, const fs::path& out_dir, const std::string& cache) {
  const int kk = k < 0 ? 40 : k;
  const auto ref = obtain_ref(kk, 2, cache);

  MatrixXd coords(3, 2);
  coords << 0.0, 0.0, 1.0, 0.0, 0.0, 1.0;
  const auto eb = divfree::build_divfree_elem(*ref, coords);
  const MatrixXd& qpts = ref->ortho.quad.points;
  const VectorXd& w = ref->ortho.quad.weights;
  const Eigen::Index nq = qpts.rows();

  const VectorXd gs = stack_components(field_conditioning(qpts));
  const VectorXd coef = divfree::project_l2(eb, gs);

  const MatrixXd grid = divfree::simplex_grid(50, 2);
  const Eigen::Index ng = grid.rows();
  const MatrixXd W = divfree::evaluate_divfree(eb, grid);
  const MatrixXd exact = field_conditioning(grid);

  // Same least-squares fit in the monomial divergence-free basis; its normal
  // equations are the ill-conditioned path.
  const auto mono = divfree::build_monomial_divfree(kk, 2);
  const MatrixXd Mq = divfree::evaluate_monomial_divfree(mono, qpts);
  const MatrixXd Mg = divfree::evaluate_monomial_divfree(mono, grid);
  const Eigen::Index nm = Mq.cols();
  MatrixXd gram = MatrixXd::Zero(nm, nm);
  VectorXd rhs = VectorXd::Zero(nm);
  for (int i = 0; i < 2; ++i) {
    const MatrixXd blk = Mq.middleRows(i * nq, nq);
    gram.noalias() += blk.transpose() * (blk.array().colwise() * w.array()).matrix();
    rhs.noalias() += blk.transpose() * w.cwiseProduct(gs.segment(i * nq, nq));
  }

  divfree::CsvTable table;
  table.schema = "conditioning-v1";
  table.columns = {"degree", "err_arnoldi", "err_monomial"};
  for (int j = 0; j <= kk; ++j) {
    const Eigen::Index n = ref->n_offsets[j];
    double err_a = 0.0;
    for (int i = 0; i < 2; ++i)
      err_a = std::max(err_a, (W.block(i * ng, 0, ng, n) * coef.head(n) - exact.col(i))
                                  .cwiseAbs()
                                  .maxCoeff());
    const Eigen::Index njm = mono.n_offsets[j];
    const VectorXd cm = gram.topLeftCorner(njm, njm).ldlt().solve(rhs.head(njm));
    double err_m = 0.0;
    for (int i = 0; i < 2; ++i)
      err_m = std::max(err_m, (Mg.block(i * ng, 0, ng, njm) * cm - exact.col(i))
                                  .cwiseAbs()
                                  .maxCoeff());
    table.rows.push_back({double(j), err_a, err_m});
  }
  divfree::write_csv(out_dir / "conditioning.csv", table);
  std::cout << "wrote " << (out_dir / "conditioning.csv").string() << "\n";
}

enum class Solver { kHelmholtz, kLaplace, kPoisson, kCorner };

void run_solver(Solver which, const std::string& mesh_spec, int k, const fs::path& out_dir,
                const std::string& cache, unsigned threads) {
  std::string spec = mesh_spec;
  if (spec.empty()) {
    if (which == Solver::kCorner)
      spec = "lshape";
    else
      throw std::runtime_error("this experiment needs --mesh");
  }
  const divfree::SimplicialMesh mesh = parse_mesh_spec(spec);
  const int d = mesh.dim;

  int kk = k;
  if (kk < 0) {
    switch (which) {
      case Solver::kHelmholtz: kk = d == 2 ? 20 : 8; break;
      case Solver::kLaplace: kk = 15; break;
      case Solver::kPoisson: kk = 17; break;
      case Solver::kCorner: kk = 8; break;
    }
  }

  divfree::HybridOptions opts;
  opts.threads = threads;
  if (!cache.empty()) opts.ref = obtain_ref(kk, d, cache);

  // Exact references: square meshes use the rotational/gradient split data,
  // other 2-D meshes and 3-D meshes use divergence-free data (u = g).
  VectorField exact_u;
  ScalarField exact_lambda;
  const double t0 = now_seconds();
  divfree::HybridSolution sol;
  switch (which) {
    case Solver::kHelmholtz:
      if (d == 3) {
        sol = divfree::driver_helmholtz(mesh, field_3d_u, kk, opts);
        exact_u = field_3d_u;
        exact_lambda = [](const MatrixXd& x) { return VectorXd::Zero(x.rows()).eval(); };
      } else if (spec.rfind("square", 0) == 0) {
        sol = divfree::driver_helmholtz(mesh, field_square_g, kk, opts);
        exact_u = field_square_u;
        exact_lambda = field_square_lambda;
      } else {
        sol = divfree::driver_helmholtz(mesh, field_square_u, kk, opts);
        exact_u = field_square_u;
        exact_lambda = [](const MatrixXd& x) { return VectorXd::Zero(x.rows()).eval(); };
      }
      break;
    case Solver::kLaplace:
      sol = divfree::driver_laplace(mesh, field_laplace_lambda, kk, opts);
      exact_u = field_laplace_u;
      exact_lambda = field_laplace_lambda;
      break;
    case Solver::kPoisson:
      sol = divfree::driver_poisson(mesh, field_poisson_f, kk, opts);
      exact_u = field_poisson_u;
      exact_lambda = field_poisson_lambda;
      break;
    case Solver::kCorner:
      sol = divfree::driver_laplace(mesh, field_corner_lambda, kk, opts);
      break;
  }
  const double t_total = now_seconds() - t0;

  divfree::CsvTable table;
  const std::string name = which == Solver::kHelmholtz ? "helmholtz"
                           : which == Solver::kLaplace ? "laplace"
                           : which == Solver::kPoisson ? "poisson"
                                                       : "corner";
  if (which == Solver::kCorner) {
    table.schema = "corner-v1";
    table.columns = {"degree", "dofs", "lambda_probe", "t_assemble", "t_solve", "t_recover"};
    Eigen::RowVector2d probe(0.99, 0.99);
    const auto [elem, ref_pt] = divfree::locate_point(mesh, probe.transpose());
    for (int kp = 0; kp <= kk; ++kp) {
      const double dofs = double(mesh.n_interior * sol.fbasis.m_tilde_at(kp));
      const double lam = divfree::eval_lambda(sol, elem, kp, ref_pt.transpose())(0);
      table.rows.push_back({double(kp), dofs, lam, sol.t_degree[kp].assemble,
                            sol.t_degree[kp].solve, sol.t_degree[kp].recover});
    }
  } else {
    const int pts = d == 2 ? 40 : 20;
    const MatrixXd uerr = divfree::u_error_table(sol, exact_u, pts);
    const VectorXd lerr = divfree::lambda_error_table(sol, exact_lambda, pts);
    table.schema = name + "-v1";
    table.columns = {"degree", "dofs"};
    const char* comp[] = {"err_ux", "err_uy", "err_uz"};
    for (int i = 0; i < d; ++i) table.columns.push_back(comp[i]);
    table.columns.insert(table.columns.end(),
                         {"err_lambda", "flux_jump", "t_assemble", "t_solve", "t_recover"});
    if (which == Solver::kPoisson) table.columns.push_back("div_gap");
    for (int kp = 0; kp <= kk; ++kp) {
      std::vector<double> row = {double(kp),
                                 double(mesh.n_interior * sol.fbasis.m_tilde_at(kp))};
      for (int i = 0; i < d; ++i) row.push_back(uerr(kp, i));
      row.push_back(lerr(kp));
      row.push_back(divfree::max_flux_jump(sol, kp));
      row.push_back(sol.t_degree[kp].assemble);
      row.push_back(sol.t_degree[kp].solve);
      row.push_back(sol.t_degree[kp].recover);
      if (which == Solver::kPoisson)
        row.push_back(divfree::max_divergence_moment_gap(sol, field_poisson_f, kp));
      table.rows.push_back(std::move(row));
    }
  }
  const fs::path out = out_dir / (name + ".csv");
  divfree::write_csv(out, table);
  std::cout << "wrote " << out.string() << "\n";
  std::printf("mesh %s: %ld elements, %ld interior faces\n", spec.c_str(),
              long(mesh.n_elems()), long(mesh.n_interior));
  std::printf("basis %.3fs, setup %.3fs, degrees 0..%d total %.3fs\n", sol.t_ref, sol.t_setup,
              kk, t_total);
}

int run_basis(int dim, int degree, const std::string& cache) {
  const double t0 = now_seconds();
  bool rebuilt = false;
  const divfree::DivFreeRefBasis ref = divfree::load_or_build_ref(degree, dim, cache, &rebuilt);
  const double dt = now_seconds() - t0;

  const Eigen::MatrixXd& Q = ref.ortho.Q;
  const Eigen::VectorXd& w = ref.ortho.quad.weights;
  const double dfac = double(divfree::factorial(dim));
  const Eigen::MatrixXd gram =
      dfac * (Q.transpose() * (Q.array().colwise() * w.array()).matrix());
  const double ortho_err =
      (gram - Eigen::MatrixXd::Identity(Q.cols(), Q.cols())).cwiseAbs().maxCoeff();

  std::printf("dim %d degree %d: %ld scalar polynomials, %ld divergence-free functions\n", dim,
              degree, long(ref.ortho.n_cols()), long(ref.n_funcs()));
  std::printf("orthonormality residual %.3e, %s in %.3fs\n", ortho_err,
              rebuilt ? "built" : "loaded from cache", dt);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"orthonormal divergence-free simplex bases and hybridized mixed solvers"};
  app.require_subcommand(1);

  auto* basis = app.add_subcommand("basis", "build a reference basis, optionally cache it");
  int dim = 2;
  int degree = 10;
  std::string basis_cache;
  basis->add_option("--dim", dim, "simplex dimension")->required()->check(CLI::Range(1, 8));
  basis->add_option("--degree", degree, "max polynomial degree")
      ->required()
      ->check(CLI::Range(0, 200));
  basis->add_option("--cache", basis_cache, "binary cache file to reuse/write");

  auto* run = app.add_subcommand("run", "run an experiment, write CSV results");
  std::string experiment;
  std::string mesh_spec;
  std::string out_dir;
  std::string run_cache;
  int k = -1;
  unsigned threads = 0;
  run->add_option("experiment", experiment, "one of: projection conditioning helmholtz laplace poisson corner")
      ->required()
      ->check(CLI::IsMember(
          {"projection", "conditioning", "helmholtz", "laplace", "poisson", "corner"}));
  run->add_option("--mesh", mesh_spec, "squareN, lshape[:levels[,ratio]], or a mesh file");
  run->add_option("--k", k, "max degree (default depends on the experiment)");
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--cache", run_cache, "basis cache file");
  run->add_option("--threads", threads, "worker threads (0 = hardware)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (basis->parsed()) return run_basis(dim, degree, basis_cache);
    const fs::path out(out_dir);
    fs::create_directories(out);
    if (experiment == "projection")
      run_projection(k, out, run_cache);
    else if (experiment == "conditioning")
      run_conditioning(k, out, run_cache);
    else if (experiment == "helmholtz")
      run_solver(Solver::kHelmholtz, mesh_spec, k, out, run_cache, threads);
    else if (experiment == "laplace")
      run_solver(Solver::kLaplace, mesh_spec, k, out, run_cache, threads);
    else if (experiment == "poisson")
      run_solver(Solver::kPoisson, mesh_spec, k, out, run_cache, threads);
    else
      run_solver(Solver::kCorner, mesh_spec, k, out, run_cache, threads);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
