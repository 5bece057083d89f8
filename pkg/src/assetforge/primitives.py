"""Parametric meshes used for demos, fixtures, and pipeline smoke runs."""

from __future__ import annotations

import math

import numpy as np

from .model import TriMesh


def box_mesh(size_x: float, size_y: float, size_z: float, center=(0.0, 0.0, 0.0)) -> TriMesh:
    """Axis-aligned box with outward winding."""
    hx, hy, hz = size_x / 2.0, size_y / 2.0, size_z / 2.0
    cx, cy, cz = center
    verts = np.array(
        [[sx * hx + cx, sy * hy + cy, sz * hz + cz] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)],
        dtype=np.float64,
    )
    # index layout: bit2 = x, bit1 = y, bit0 = z
    quads = [
        (0, 1, 3, 2),  # -x
        (4, 6, 7, 5),  # +x
        (0, 4, 5, 1),  # -y
        (2, 3, 7, 6),  # +y
        (0, 2, 6, 4),  # -z
        (1, 5, 7, 3),  # +z
    ]
    faces = []
    for a, b, c, d in quads:
        faces.append((a, b, c))
        faces.append((a, c, d))
    return TriMesh(verts, np.array(faces, dtype=np.int64))


def cylinder_mesh(radius: float, height: float, segments: int = 32, center=(0.0, 0.0, 0.0)) -> TriMesh:
    """Closed cylinder about the z axis."""
    cx, cy, cz = center
    lo, hi = cz - height / 2.0, cz + height / 2.0
    angles = 2.0 * math.pi * np.arange(segments) / segments
    ring = np.column_stack([radius * np.cos(angles) + cx, radius * np.sin(angles) + cy])
    verts = [(x, y, lo) for x, y in ring] + [(x, y, hi) for x, y in ring]
    verts += [(cx, cy, lo), (cx, cy, hi)]
    bottom_center, top_center = 2 * segments, 2 * segments + 1
    faces = []
    for i in range(segments):
        j = (i + 1) % segments
        faces.append((i, j, segments + j))
        faces.append((i, segments + j, segments + i))
        faces.append((bottom_center, j, i))
        faces.append((top_center, segments + i, segments + j))
    return TriMesh(np.array(verts, dtype=np.float64), np.array(faces, dtype=np.int64))


def icosphere_mesh(radius: float, subdivisions: int = 2, center=(0.0, 0.0, 0.0)) -> TriMesh:
    """Geodesic sphere from a subdivided icosahedron."""
    t = (1.0 + math.sqrt(5.0)) / 2.0
    verts = np.array(
        [
            (-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
            (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
            (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1),
        ],
        dtype=np.float64,
    )
    verts /= np.linalg.norm(verts, axis=1)[:, None]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    verts = [tuple(v) for v in verts]
    for _ in range(subdivisions):
        cache: dict[tuple[int, int], int] = {}

        def midpoint(a: int, b: int) -> int:
            key = (min(a, b), max(a, b))
            if key not in cache:
                m = np.array(verts[a]) + np.array(verts[b])
                m /= np.linalg.norm(m)
                cache[key] = len(verts)
                verts.append(tuple(m))
            return cache[key]

        next_faces = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            next_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = next_faces
    arr = np.array(verts, dtype=np.float64) * radius + np.array(center, dtype=np.float64)
    return TriMesh(arr, np.array(faces, dtype=np.int64))


def diamond_prism_mesh(half_diagonal: float, length: float, center=(0.0, 0.0, 0.0)) -> TriMesh:
    """Prism whose cross-section is a square rotated 45 degrees.

    The four long faces form 45-degree slopes in the xz plane, which
    makes the shape handy for exercising friction-cone limits.
    """
    a = half_diagonal
    cx, cy, cz = center
    ys = (cy - length / 2.0, cy + length / 2.0)
    ring = [(cx + a, cz), (cx, cz + a), (cx - a, cz), (cx, cz - a)]
    verts = [(x, y, z) for y in ys for x, z in ring]
    faces = []
    for i in range(4):
        j = (i + 1) % 4
        faces.append((i, j, 4 + j))
        faces.append((i, 4 + j, 4 + i))
    faces += [(0, 2, 1), (0, 3, 2)]  # -y cap
    faces += [(4, 5, 6), (4, 6, 7)]  # +y cap
    return TriMesh(np.array(verts, dtype=np.float64), np.array(faces, dtype=np.int64))


def lshape_mesh(arm: float, thickness: float, height: float) -> TriMesh:
    """Two fused boxes forming an L in the xy plane (single component)."""
    a = box_mesh(arm, thickness, height, center=(arm / 2.0, thickness / 2.0, height / 2.0))
    b = box_mesh(thickness, arm, height, center=(thickness / 2.0, arm / 2.0, height / 2.0))
    return merge_meshes(a, b)


def merge_meshes(*meshes: TriMesh) -> TriMesh:
    """Concatenate meshes, welding vertices that coincide exactly."""
    verts: list[tuple[float, float, float]] = []
    index: dict[tuple[float, float, float], int] = {}
    faces = []
    for mesh in meshes:
        remap = []
        for v in mesh.vertices:
            key = (float(v[0]), float(v[1]), float(v[2]))
            if key not in index:
                index[key] = len(verts)
                verts.append(key)
            remap.append(index[key])
        for f in mesh.faces:
            faces.append((remap[f[0]], remap[f[1]], remap[f[2]]))
    return TriMesh(np.array(verts, dtype=np.float64), np.array(faces, dtype=np.int64))


def with_degenerate_faces(mesh: TriMesh, n_degenerate: int) -> TriMesh:
    """Append zero-area faces (distinct indices, duplicated positions)."""
    verts = list(map(tuple, mesh.vertices))
    faces = list(map(tuple, mesh.faces))
    base = verts[0]
    for _ in range(n_degenerate):
        i = len(verts)
        verts += [base, base, base]
        faces.append((i, i + 1, i + 2))
    return TriMesh(np.array(verts, dtype=np.float64), np.array(faces, dtype=np.int64))
