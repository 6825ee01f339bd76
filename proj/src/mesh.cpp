// Copyright (c) 2026 The divfree authors
// SPDX-License-Identifier: MIT

#include "divfree/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "divfree/combinatorics.hpp"

namespace divfree {

namespace {

Eigen::MatrixXd edge_matrix(const Eigen::MatrixXd& coords) {
  const int d = static_cast<int>(coords.cols());
  Eigen::MatrixXd E(d, d);
  for (int m = 0; m < d; ++m) E.col(m) = (coords.row(m + 1) - coords.row(0)).transpose();
  return E;
}

// Signed d! * volume; positive for the canonical orientation.
double signed_det(const SimplicialMesh& mesh, Eigen::Index e) {
  return edge_matrix(mesh.element_coords(e)).determinant();
}

}  // namespace

Eigen::MatrixXd SimplicialMesh::element_coords(Eigen::Index e) const {
  Eigen::MatrixXd X(dim + 1, dim);
  for (int v = 0; v <= dim; ++v) X.row(v) = nodes.row(elements(e, v));
  return X;
}

void finalize_mesh(SimplicialMesh& mesh) {
  const int d = mesh.dim;
  const Eigen::Index ne = mesh.n_elems();
  if (d < 2 || d > 3) throw std::invalid_argument("mesh: dim must be 2 or 3");
  if (mesh.elements.cols() != d + 1) throw std::invalid_argument("mesh: element arity mismatch");
  if (mesh.elements.size() > 0 &&
      (mesh.elements.minCoeff() < 0 || mesh.elements.maxCoeff() >= mesh.n_nodes()))
    throw std::runtime_error("mesh: element node index out of range");

  for (Eigen::Index e = 0; e < ne; ++e) {
    const double det = signed_det(mesh, e);
    if (det == 0.0) throw std::runtime_error("mesh: degenerate element " + std::to_string(e));
    if (det < 0.0) std::swap(mesh.elements(e, d - 1), mesh.elements(e, d));
  }

  // Faces keyed by ascending node tuple; first-seen element is the lower
  // index, hence the owner e+.
  std::map<std::vector<int>, Eigen::Index> index_of;
  mesh.faces.clear();
  mesh.elem_faces.setConstant(ne, d + 1, -1);
  std::vector<int> key(d);
  for (Eigen::Index e = 0; e < ne; ++e) {
    for (int g = 0; g <= d; ++g) {
      int t = 0;
      for (int v = 0; v <= d; ++v)
        if (v != g) key[t++] = mesh.elements(e, v);
      std::sort(key.begin(), key.end());
      auto [it, fresh] = index_of.try_emplace(key, static_cast<Eigen::Index>(mesh.faces.size()));
      if (fresh) {
        MeshFace face;
        face.nodes = key;
        face.elem_pos = static_cast<int>(e);
        face.local_pos = g;
        mesh.faces.push_back(std::move(face));
      } else {
        MeshFace& face = mesh.faces[it->second];
        if (face.elem_neg != -1) throw std::runtime_error("mesh: face shared by three elements");
        face.elem_neg = static_cast<int>(e);
        face.local_neg = g;
      }
      mesh.elem_faces(e, g) = static_cast<int>(it->second);
    }
  }

  // Renumber in sorted-tuple order (the map iterates in that order already).
  Eigen::Index pos = 0;
  std::vector<Eigen::Index> perm(mesh.faces.size());
  for (const auto& [k, old] : index_of) perm[old] = pos++;
  std::vector<MeshFace> sorted(mesh.faces.size());
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) sorted[perm[f]] = std::move(mesh.faces[f]);
  mesh.faces = std::move(sorted);
  for (Eigen::Index e = 0; e < ne; ++e)
    for (int g = 0; g <= d; ++g) mesh.elem_faces(e, g) = static_cast<int>(perm[mesh.elem_faces(e, g)]);

  mesh.n_interior = 0;
  for (auto& face : mesh.faces) {
    face.interior_index = face.elem_neg >= 0 ? static_cast<int>(mesh.n_interior++) : -1;
    const ElementGeometry geom = element_geometry(mesh, face.elem_pos);
    face.normal = geom.normals.row(face.local_pos).transpose();
    face.measure = geom.face_measures(face.local_pos);
  }
}

SimplicialMesh gen_uniform_square(int n) {
  if (n < 1) throw std::invalid_argument("mesh: need n >= 1");
  SimplicialMesh mesh;
  mesh.dim = 2;
  const int s = n + 1;
  mesh.nodes.resize(static_cast<Eigen::Index>(s) * s, 2);
  for (int iy = 0; iy < s; ++iy)
    for (int ix = 0; ix < s; ++ix)
      mesh.nodes.row(static_cast<Eigen::Index>(iy) * s + ix)
          << static_cast<double>(ix) / n, static_cast<double>(iy) / n;
  mesh.elements.resize(2 * static_cast<Eigen::Index>(n) * n, 3);
  Eigen::Index e = 0;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const int a = iy * s + ix, b = iy * s + ix + 1, c = (iy + 1) * s + ix + 1,
                dd = (iy + 1) * s + ix;
      mesh.elements.row(e++) << a, b, c;
      mesh.elements.row(e++) << a, c, dd;
    }
  finalize_mesh(mesh);
  return mesh;
}

SimplicialMesh gen_lshape_graded(int levels, double ratio) {
  if (levels < 1) throw std::invalid_argument("mesh: need levels >= 1");
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("mesh: ratio must be in (0,1)");
  // 1-D points on [0,1] clustering geometrically toward 1.
  std::vector<double> g(levels + 2);
  g[0] = 0.0;
  double r = 1.0;
  for (int t = 1; t <= levels; ++t) {
    r *= ratio;
    g[t] = 1.0 - r;
  }
  g[levels + 1] = 1.0;
  std::vector<double> h(g.size());  // mirror onto [1,2], fine end at 1
  for (std::size_t t = 0; t < g.size(); ++t) h[t] = 2.0 - g[g.size() - 1 - t];

  SimplicialMesh mesh;
  mesh.dim = 2;
  std::map<std::pair<double, double>, int> node_id;
  std::vector<std::pair<double, double>> coords;
  auto intern = [&](double x, double y) {
    auto [it, fresh] = node_id.try_emplace({x, y}, static_cast<int>(coords.size()));
    if (fresh) coords.emplace_back(x, y);
    return it->second;
  };
  std::vector<std::array<int, 3>> tris;
  auto add_square = [&](const std::vector<double>& xs, const std::vector<double>& ys) {
    for (std::size_t iy = 0; iy + 1 < ys.size(); ++iy)
      for (std::size_t ix = 0; ix + 1 < xs.size(); ++ix) {
        const int a = intern(xs[ix], ys[iy]);
        const int b = intern(xs[ix + 1], ys[iy]);
        const int c = intern(xs[ix + 1], ys[iy + 1]);
        const int d = intern(xs[ix], ys[iy + 1]);
        tris.push_back({a, b, c});
        tris.push_back({a, c, d});
      }
  };
  add_square(g, g);  // [0,1]^2
  add_square(h, g);  // [1,2] x [0,1]
  add_square(g, h);  // [0,1] x [1,2]

  mesh.nodes.resize(static_cast<Eigen::Index>(coords.size()), 2);
  for (std::size_t v = 0; v < coords.size(); ++v)
    mesh.nodes.row(static_cast<Eigen::Index>(v)) << coords[v].first, coords[v].second;
  mesh.elements.resize(static_cast<Eigen::Index>(tris.size()), 3);
  for (std::size_t e = 0; e < tris.size(); ++e)
    mesh.elements.row(static_cast<Eigen::Index>(e)) << tris[e][0], tris[e][1], tris[e][2];
  finalize_mesh(mesh);
  return mesh;
}

SimplicialMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("mesh: cannot open " + path);
  long line_no = 0;
  auto next_line = [&](std::istringstream& ss) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
      ss = std::istringstream(line);
      return;
    }
    throw std::runtime_error("mesh: unexpected end of file in " + path);
  };

  std::istringstream ss;
  next_line(ss);
  int d = 0;
  Eigen::Index nv = 0, ne = 0;
  if (!(ss >> d >> nv >> ne) || d < 2 || d > 3 || nv < d + 1 || ne < 1)
    throw std::runtime_error("mesh: bad header at line " + std::to_string(line_no));

  SimplicialMesh mesh;
  mesh.dim = d;
  mesh.nodes.resize(nv, d);
  for (Eigen::Index v = 0; v < nv; ++v) {
    next_line(ss);
    for (int i = 0; i < d; ++i)
      if (!(ss >> mesh.nodes(v, i)))
        throw std::runtime_error("mesh: bad coordinate at line " + std::to_string(line_no));
  }
  mesh.elements.resize(ne, d + 1);
  for (Eigen::Index e = 0; e < ne; ++e) {
    next_line(ss);
    for (int v = 0; v <= d; ++v) {
      long idx = 0;
      if (!(ss >> idx) || idx < 1 || idx > nv)
        throw std::runtime_error("mesh: bad element index at line " + std::to_string(line_no));
      mesh.elements(e, v) = static_cast<int>(idx - 1);
    }
  }
  finalize_mesh(mesh);
  return mesh;
}

void save_mesh(const SimplicialMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("mesh: cannot write " + path);
  out << mesh.dim << ' ' << mesh.n_nodes() << ' ' << mesh.n_elems() << '\n';
  char buf[40];
  for (Eigen::Index v = 0; v < mesh.n_nodes(); ++v) {
    for (int i = 0; i < mesh.dim; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", mesh.nodes(v, i));
      out << (i ? " " : "") << buf;
    }
    out << '\n';
  }
  for (Eigen::Index e = 0; e < mesh.n_elems(); ++e) {
    for (int v = 0; v <= mesh.dim; ++v) out << (v ? " " : "") << mesh.elements(e, v) + 1;
    out << '\n';
  }
  if (!out) throw std::runtime_error("mesh: write failed for " + path);
}

ElementGeometry element_geometry(const SimplicialMesh& mesh, Eigen::Index e) {
  const int d = mesh.dim;
  ElementGeometry geom;
  geom.coords = mesh.element_coords(e);
  geom.edge = edge_matrix(geom.coords);
  const double det = geom.edge.determinant();
  const double scale = geom.edge.colwise().norm().maxCoeff();
  if (!(std::abs(det) > 1e-12 * std::pow(scale, d)))
    throw std::runtime_error("mesh: degenerate element " + std::to_string(e));
  geom.jacobian = geom.edge.inverse();
  geom.volume = std::abs(det) / static_cast<double>(factorial(d));

  // Face opposite local node g is the zero set of barycentric coordinate g;
  // the outward direction is the negative barycentric gradient.
  geom.normals.resize(d + 1, d);
  geom.face_measures.resize(d + 1);
  for (int g = 0; g <= d; ++g) {
    Eigen::RowVectorXd grad;
    if (g == 0)
      grad = -geom.jacobian.colwise().sum();
    else
      grad = geom.jacobian.row(g - 1);
    geom.normals.row(g) = -grad / grad.norm();

    Eigen::MatrixXd span(d, d - 1);
    int first = g == 0 ? 1 : 0;
    int t = 0;
    for (int v = 0; v <= d; ++v) {
      if (v == g || v == first) continue;
      span.col(t++) = (geom.coords.row(v) - geom.coords.row(first)).transpose();
    }
    const double gram = (span.transpose() * span).determinant();
    geom.face_measures(g) = std::sqrt(gram) / static_cast<double>(factorial(d - 1));
  }
  return geom;
}

FaceFrame face_frame(const SimplicialMesh& mesh, Eigen::Index f) {
  const MeshFace& face = mesh.faces.at(static_cast<std::size_t>(f));
  const int d = mesh.dim;
  FaceFrame frame;
  frame.face = f;
  frame.origin = mesh.nodes.row(face.nodes[0]).transpose();
  frame.span.resize(d, d - 1);
  for (int m = 1; m < d; ++m)
    frame.span.col(m - 1) = (mesh.nodes.row(face.nodes[m]) - mesh.nodes.row(face.nodes[0])).transpose();
  const double gram = (frame.span.transpose() * frame.span).determinant();
  frame.measure = std::sqrt(gram) / static_cast<double>(factorial(d - 1));
  return frame;
}

Eigen::MatrixXd face_points_physical(const FaceFrame& frame,
                                     const Eigen::Ref<const Eigen::MatrixXd>& zeta) {
  Eigen::MatrixXd x = zeta * frame.span.transpose();
  x.rowwise() += frame.origin.transpose();
  return x;
}

Eigen::MatrixXd physical_to_ref(const ElementGeometry& geom,
                                const Eigen::Ref<const Eigen::MatrixXd>& x) {
  Eigen::MatrixXd shifted = x;
  shifted.rowwise() -= geom.coords.row(0);
  return shifted * geom.jacobian.transpose();
}

std::pair<Eigen::Index, Eigen::VectorXd> locate_point(const SimplicialMesh& mesh,
                                                      const Eigen::VectorXd& x, double tol) {
  Eigen::Index best = -1;
  Eigen::VectorXd best_ref;
  double best_slack = -std::numeric_limits<double>::infinity();
  for (Eigen::Index e = 0; e < mesh.n_elems(); ++e) {
    const ElementGeometry geom = element_geometry(mesh, e);
    const Eigen::VectorXd ref = (geom.jacobian * (x - geom.coords.row(0).transpose()));
    const double slack = std::min(ref.minCoeff(), 1.0 - ref.sum());
    if (slack >= 0.0) return {e, ref};
    if (slack > best_slack) {
      best_slack = slack;
      best = e;
      best_ref = ref;
    }
  }
  if (best >= 0 && best_slack >= -tol) return {best, best_ref};
  throw std::runtime_error("mesh: point outside mesh");
}

}  // namespace divfree
