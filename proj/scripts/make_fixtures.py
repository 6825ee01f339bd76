#!/usr/bin/env python3
# Copyright (c) 2026 The divfree authors
# SPDX-License-Identifier: MIT
"""Generate the random simplicial test meshes under fixtures/.

Delaunay triangulations of fixed-seed random points; the seeds are chosen so
no element is close to degenerate (checked below). Rerunning reproduces the
committed files bit for bit.
"""

import pathlib

import numpy as np
from scipy.spatial import Delaunay

OUT = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def jittered_cube(n, seed, amp):
    """(n+1)^3 lattice with jitter; boundary coordinates stay pinned so the
    hull is exactly the unit cube."""
    rng = np.random.default_rng(seed)
    g = np.linspace(0.0, 1.0, n + 1)
    pts = np.array([[x, y, z] for x in g for y in g for z in g])
    jit = rng.uniform(-amp / n, amp / n, pts.shape)
    interior = (pts > 0.0) & (pts < 1.0)
    return pts + jit * interior


def element_quality(points, simplices):
    """min over elements of |det E| / max_edge^d (degeneracy measure)."""
    worst = np.inf
    for simp in simplices:
        coords = points[simp]
        edges = coords[1:] - coords[0]
        det = abs(np.linalg.det(edges))
        scale = max(np.linalg.norm(coords[i] - coords[j])
                    for i in range(len(simp)) for j in range(i))
        worst = min(worst, det / scale ** points.shape[1])
    return worst


def write_mesh(path, points, simplices):
    d = points.shape[1]
    lines = [f"{d} {len(points)} {len(simplices)}"]
    for p in points:
        lines.append(" ".join(f"{c:.17g}" for c in p))
    for simp in simplices:
        lines.append(" ".join(str(int(v) + 1) for v in simp))
    path.write_text("\n".join(lines) + "\n")
    print(f"{path}: {len(points)} nodes, {len(simplices)} elements")


def main():
    OUT.mkdir(exist_ok=True)

    rng = np.random.default_rng(7)
    pts2 = rng.random((50, 2))
    tri = Delaunay(pts2)
    q = element_quality(pts2, tri.simplices)
    assert q > 1e-3, f"2-D mesh too close to degenerate: {q:.2e}"
    write_mesh(OUT / "tri50.mesh", pts2, tri.simplices)

    rng = np.random.default_rng(167)
    inner = rng.random((12, 3))
    corners = np.array([[float(b) for b in f"{i:03b}"] for i in range(8)])
    pts3 = np.vstack([corners, inner])
    tet = Delaunay(pts3)
    q = element_quality(pts3, tet.simplices)
    assert q > 1e-2, f"3-D mesh too close to degenerate: {q:.2e}"
    write_mesh(OUT / "tet20.mesh", pts3, tet.simplices)

    fine = jittered_cube(3, 24, 0.3)
    tetf = Delaunay(fine)
    q = element_quality(fine, tetf.simplices)
    assert q > 5e-2, f"fine 3-D mesh too close to degenerate: {q:.2e}"
    write_mesh(OUT / "tet64.mesh", fine, tetf.simplices)


if __name__ == "__main__":
    main()
