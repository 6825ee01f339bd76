// Copyright (c) 2026 The divfree authors
// SPDX-License-Identifier: MIT

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace divfree {

/// One (d-1)-face. Nodes are global indices in ascending order; elem_pos is
/// the lower adjacent element index (the face owner), elem_neg = -1 on the
/// boundary. normal points outward from elem_pos.
struct MeshFace {
  std::vector<int> nodes;
  int elem_pos = -1;
  int elem_neg = -1;
  int local_pos = -1;  // local face index in elem_pos (face opposite that node)
  int local_neg = -1;
  int interior_index = -1;  // dense numbering over interior faces, -1 on boundary
  double measure = 0.0;
  Eigen::VectorXd normal;
};

/// Simplicial mesh with deterministic face enumeration: faces are sorted by
/// their ascending node tuples, which fixes the global DOF numbering.
struct SimplicialMesh {
  int dim = 0;
  Eigen::MatrixXd nodes;     // n_v x d
  Eigen::MatrixXi elements;  // n_e x (d+1), 0-based, positive orientation
  std::vector<MeshFace> faces;
  Eigen::MatrixXi elem_faces;  // n_e x (d+1); column g = face opposite local node g
  Eigen::Index n_interior = 0;

  Eigen::Index n_nodes() const { return nodes.rows(); }
  Eigen::Index n_elems() const { return elements.rows(); }
  /// Node coordinates of element e, (d+1) x d.
  Eigen::MatrixXd element_coords(Eigen::Index e) const;
};

/// Per-element affine geometry. jacobian F = E^{-1} maps physical offsets to
/// reference coordinates: xhat = F (x - X_1). normals row g is the outward
/// unit normal of the face opposite local node g.
struct ElementGeometry {
  Eigen::MatrixXd coords;    // (d+1) x d
  Eigen::MatrixXd edge;      // E, d x d
  Eigen::MatrixXd jacobian;  // F = E^{-1}
  double volume = 0.0;
  Eigen::MatrixXd normals;        // (d+1) x d
  Eigen::VectorXd face_measures;  // (d+1)
};

/// Shared affine parameterization of a face by the reference (d-1)-simplex,
/// anchored at the ascending node tuple so both adjacent elements see the
/// same map: x(zeta) = origin + span * zeta.
struct FaceFrame {
  long face = -1;
  Eigen::VectorXd origin;
  Eigen::MatrixXd span;  // d x (d-1)
  double measure = 0.0;
};

SimplicialMesh gen_uniform_square(int n);

/// L-shape [0,2]^2 minus (1,2)^2, tensor grading toward the re-entrant corner
/// (1,1); 6*(levels+1)^2 elements, smallest cells of size ~ratio^levels.
SimplicialMesh gen_lshape_graded(int levels = 12, double ratio = 0.5);

SimplicialMesh load_mesh(const std::string& path);
void save_mesh(const SimplicialMesh& mesh, const std::string& path);

ElementGeometry element_geometry(const SimplicialMesh& mesh, Eigen::Index e);

FaceFrame face_frame(const SimplicialMesh& mesh, Eigen::Index f);

/// Physical coordinates of reference-face points (n_q x (d-1)) -> n_q x d.
Eigen::MatrixXd face_points_physical(const FaceFrame& frame,
                                     const Eigen::Ref<const Eigen::MatrixXd>& zeta);

/// Element reference coordinates of physical points (n_q x d) -> n_q x d.
Eigen::MatrixXd physical_to_ref(const ElementGeometry& geom,
                                const Eigen::Ref<const Eigen::MatrixXd>& x);

/// Orientation fix plus face/adjacency construction; called by all
/// generators and the loader, exposed for programmatic mesh assembly.
void finalize_mesh(SimplicialMesh& mesh);

/// Element containing x (linear scan over barycentric coordinates, ties go to
/// the lowest element index) and its reference coordinates; error if x lies
/// outside every element by more than tol.
std::pair<Eigen::Index, Eigen::VectorXd> locate_point(const SimplicialMesh& mesh,
                                                      const Eigen::VectorXd& x,
                                                      double tol = 1e-12);

}  // namespace divfree
