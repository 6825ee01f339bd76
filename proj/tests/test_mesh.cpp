// Copyright (c) 2026 The divfree authors
// SPDX-License-Identifier: MIT

#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "divfree/mesh.hpp"

using divfree::element_geometry;
using divfree::gen_lshape_graded;
using divfree::gen_uniform_square;
using divfree::SimplicialMesh;

namespace {

std::string fixture(const char* name) {
  return (std::filesystem::path(DIVFREE_FIXTURE_DIR) / name).string();
}

// Sum of measure-weighted outward normals over a set of faces.
Eigen::VectorXd normal_sum(const SimplicialMesh& mesh, bool boundary_only) {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(mesh.dim);
  for (const auto& f : mesh.faces)
    if (!boundary_only || f.interior_index < 0) s += f.measure * f.normal;
  return s;
}

}  // namespace

TEST_SUITE("mesh") {

TEST_CASE("uniform square counts and volumes") {
  const auto mesh = gen_uniform_square(2);
  CHECK(mesh.dim == 2);
  CHECK(mesh.n_nodes() == 9);
  CHECK(mesh.n_elems() == 8);
  CHECK(Eigen::Index(mesh.faces.size()) == 16);
  CHECK(mesh.n_interior == 8);
  for (Eigen::Index e = 0; e < mesh.n_elems(); ++e) {
    const auto geom = element_geometry(mesh, e);
    CHECK(geom.volume == doctest::Approx(0.125).epsilon(1e-14));
    // Closed-surface identity per element.
    Eigen::RowVectorXd s = Eigen::RowVectorXd::Zero(2);
    for (int g = 0; g < 3; ++g) s += geom.face_measures(g) * geom.normals.row(g);
    CHECK(s.cwiseAbs().maxCoeff() <= 1e-14);
  }
  CHECK(normal_sum(mesh, true).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("reference normals and measures of a stretched triangle") {
  SimplicialMesh mesh;
  mesh.dim = 2;
  mesh.nodes.resize(3, 2);
  mesh.nodes << 0, 0, 1, 0, 0, 2;
  mesh.elements.resize(1, 3);
  mesh.elements << 0, 1, 2;
  divfree::finalize_mesh(mesh);

  const auto geom = element_geometry(mesh, 0);
  CHECK(geom.volume == doctest::Approx(1.0).epsilon(1e-15));
  const double s5 = std::sqrt(5.0);
  // Local face g is opposite vertex g.
  CHECK(geom.normals(0, 0) == doctest::Approx(2.0 / s5));
  CHECK(geom.normals(0, 1) == doctest::Approx(1.0 / s5));
  CHECK(geom.normals(1, 0) == doctest::Approx(-1.0));
  CHECK(geom.normals(1, 1) == doctest::Approx(0.0));
  CHECK(geom.normals(2, 0) == doctest::Approx(0.0));
  CHECK(geom.normals(2, 1) == doctest::Approx(-1.0));
  CHECK(geom.face_measures(0) == doctest::Approx(s5));
  CHECK(geom.face_measures(1) == doctest::Approx(2.0));
  CHECK(geom.face_measures(2) == doctest::Approx(1.0));
}

TEST_CASE("interior faces see opposite normals from both sides") {
  const auto mesh = gen_uniform_square(3);
  int checked = 0;
  for (const auto& f : mesh.faces) {
    if (f.interior_index < 0) continue;
    const auto gp = element_geometry(mesh, f.elem_pos);
    const auto gn = element_geometry(mesh, f.elem_neg);
    CHECK((gp.normals.row(f.local_pos) + gn.normals.row(f.local_neg)).cwiseAbs().maxCoeff() <=
          1e-13);
    CHECK(gp.normals.row(f.local_pos).transpose().isApprox(f.normal, 1e-13));
    CHECK(gp.face_measures(f.local_pos) == doctest::Approx(f.measure).epsilon(1e-13));
    CHECK(gn.face_measures(f.local_neg) == doctest::Approx(f.measure).epsilon(1e-13));
    ++checked;
  }
  CHECK(checked == mesh.n_interior);
}

TEST_CASE("face frame parameterizes physical face points consistently") {
  const auto mesh = gen_uniform_square(2);
  for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
    const auto frame = divfree::face_frame(mesh, Eigen::Index(fi));
    Eigen::MatrixXd zeta(3, 1);
    zeta << 0.0, 0.5, 1.0;
    const Eigen::MatrixXd x = divfree::face_points_physical(frame, zeta);
    // Endpoints are the ascending node pair of the face.
    const auto& f = mesh.faces[fi];
    CHECK((x.row(0) - mesh.nodes.row(f.nodes[0])).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((x.row(2) - mesh.nodes.row(f.nodes[1])).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(frame.measure == doctest::Approx(f.measure).epsilon(1e-14));
  }
}

TEST_CASE("graded L-shape: counts, coverage, grading") {
  const int levels = 2;
  const auto mesh = gen_lshape_graded(levels, 0.5);
  CHECK(mesh.n_elems() == 6 * (levels + 1) * (levels + 1));
  double min_vol = 1e300;
  for (Eigen::Index e = 0; e < mesh.n_elems(); ++e) {
    const auto geom = element_geometry(mesh, e);
    CHECK(geom.volume > 0.0);
    min_vol = std::min(min_vol, geom.volume);
    const Eigen::RowVectorXd c = geom.coords.colwise().mean();
    CHECK(!(c(0) > 1.0 + 1e-12 && c(1) > 1.0 + 1e-12));  // hole stays empty
    CHECK(c.minCoeff() > 0.0);
    CHECK(c.maxCoeff() < 2.0);
  }
  // Smallest cells hug the re-entrant corner: area ~ (ratio^levels)^2 / 2.
  CHECK(min_vol <= 0.5 * std::pow(0.5, 2 * levels) + 1e-12);
  CHECK(normal_sum(mesh, true).cwiseAbs().maxCoeff() <= 1e-12);

  const auto deep = gen_lshape_graded(12, 0.5);
  CHECK(deep.n_elems() == 1014);
}

TEST_CASE("save and load round trip exactly") {
  const auto mesh = gen_lshape_graded(1, 0.4);
  const std::string path =
      (std::filesystem::temp_directory_path() / "divfree_mesh_roundtrip.mesh").string();
  divfree::save_mesh(mesh, path);
  const auto back = divfree::load_mesh(path);
  CHECK(back.dim == mesh.dim);
  CHECK(back.nodes == mesh.nodes);
  CHECK(back.elements == mesh.elements);
  CHECK(back.faces.size() == mesh.faces.size());
  CHECK(back.n_interior == mesh.n_interior);
  std::remove(path.c_str());
}

TEST_CASE("fixture meshes load and are sane") {
  const auto tri = divfree::load_mesh(fixture("tri50.mesh"));
  CHECK(tri.dim == 2);
  CHECK(tri.n_elems() == 87);
  CHECK(normal_sum(tri, true).cwiseAbs().maxCoeff() <= 1e-12);

  const auto tet = divfree::load_mesh(fixture("tet20.mesh"));
  CHECK(tet.dim == 3);
  CHECK(tet.n_elems() == 75);
  double vol = 0.0;
  for (Eigen::Index e = 0; e < tet.n_elems(); ++e) vol += element_geometry(tet, e).volume;
  CHECK(vol == doctest::Approx(1.0).epsilon(1e-12));  // unit cube hull
  CHECK(normal_sum(tet, true).cwiseAbs().maxCoeff() <= 1e-12);

  const auto fine = divfree::load_mesh(fixture("tet64.mesh"));
  CHECK(fine.dim == 3);
  CHECK(fine.n_elems() == 175);
  vol = 0.0;
  for (Eigen::Index e = 0; e < fine.n_elems(); ++e) vol += element_geometry(fine, e).volume;
  CHECK(vol == doctest::Approx(1.0).epsilon(1e-12));  // unit cube hull
  CHECK(normal_sum(fine, true).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("point location maps back to the query point") {
  const auto mesh = gen_uniform_square(2);
  Eigen::Vector2d probe(0.3, 0.7);
  const auto [e, ref] = divfree::locate_point(mesh, probe);
  REQUIRE(e >= 0);
  const auto geom = element_geometry(mesh, e);
  const Eigen::Vector2d back =
      geom.coords.row(0).transpose() + geom.edge * ref;
  CHECK((back - probe).cwiseAbs().maxCoeff() <= 1e-13);

  // A mesh vertex is still locatable (boundary of several elements).
  const auto [e2, ref2] = divfree::locate_point(mesh, Eigen::Vector2d(0.5, 0.5));
  CHECK(e2 >= 0);
  CHECK(ref2.minCoeff() >= -1e-12);

  CHECK_THROWS(divfree::locate_point(mesh, Eigen::Vector2d(2.0, 2.0)));
}

TEST_CASE("malformed mesh files are rejected with line info") {
  const auto dir = std::filesystem::temp_directory_path();
  const std::string path = (dir / "divfree_bad.mesh").string();
  {
    FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("2 3 1\n0 0\n1 0\n0 1\n1 2 9\n", f);  // node index out of range
    std::fclose(f);
  }
  CHECK_THROWS_WITH_AS(divfree::load_mesh(path), doctest::Contains("line"),
                       std::runtime_error);
  std::remove(path.c_str());
}

}  // TEST_SUITE
