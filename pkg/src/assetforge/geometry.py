"""Mesh geometry: parsing, sampling, bounding boxes, placement.

All distance comparisons in the sampling code run on squared distances
so that greedy selections are reproducible bit-for-bit; ties always
break toward the lowest index.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.spatial import ConvexHull, QhullError
from scipy.spatial.transform import Rotation

from .errors import DegenerateMeshError, MeshParseError
from .model import (
    OrientedBoundingBox,
    PlacementAnnotation,
    PointCloud,
    Quat,
    TriMesh,
)

# Faces below this area (m^2) carry no usable surface; they stay in the
# mesh but are excluded from area-weighted sampling.
DEGENERATE_FACE_AREA = 1e-12


# ---------------------------------------------------------------------------
# mesh interchange

def _read_obj(text: str) -> TriMesh:
    vertices: list[tuple[float, float, float]] = []
    faces: list[tuple[int, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        tag = tokens[0]
        if tag == "v":
            if len(tokens) < 4:
                raise MeshParseError(f"line {lineno}: vertex needs 3 coordinates")
            try:
                vertices.append((float(tokens[1]), float(tokens[2]), float(tokens[3])))
            except ValueError as exc:
                raise MeshParseError(f"line {lineno}: non-numeric vertex coordinate") from exc
        elif tag == "f":
            if len(tokens) < 4:
                raise MeshParseError(f"line {lineno}: face needs at least 3 vertices")
            idx: list[int] = []
            for token in tokens[1:]:
                head = token.split("/")[0]
                try:
                    value = int(head)
                except ValueError as exc:
                    raise MeshParseError(f"line {lineno}: non-numeric face index {head!r}") from exc
                if value == 0:
                    raise MeshParseError(f"line {lineno}: face indices are 1-based, got 0")
                # Negative indices are relative to the vertices seen so far.
                resolved = value - 1 if value > 0 else len(vertices) + value
                if not 0 <= resolved < len(vertices):
                    raise MeshParseError(f"line {lineno}: face index {value} out of range")
                idx.append(resolved)
            for k in range(1, len(idx) - 1):  # fan triangulation
                faces.append((idx[0], idx[k], idx[k + 1]))
        # other records (vn, vt, o, g, usemtl, ...) are ignored
    if not vertices or not faces:
        raise MeshParseError("mesh has no vertices or no faces")
    return TriMesh(np.array(vertices, dtype=np.float64), np.array(faces, dtype=np.int64))


MESH_READERS = {"obj": _read_obj}


def load_mesh(data: bytes | str, format: str = "obj") -> TriMesh:
    """Decode mesh bytes. ASCII OBJ is the required interchange format;
    additional readers can be registered in ``MESH_READERS``."""
    reader = MESH_READERS.get(format)
    if reader is None:
        raise MeshParseError(f"unsupported mesh format {format!r}")
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MeshParseError("mesh bytes are not valid UTF-8 text") from exc
    return reader(data)


def write_obj(mesh: TriMesh) -> bytes:
    # repr of a Python float is the shortest digit string that round-trips,
    # so written meshes reload bit-identical
    lines = [f"v {float(x)!r} {float(y)!r} {float(z)!r}" for x, y, z in mesh.vertices]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.faces]
    return ("\n".join(lines) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# per-face quantities

def face_cross_products(mesh: TriMesh) -> np.ndarray:
    v = mesh.vertices
    f = mesh.faces
    return np.cross(v[f[:, 1]] - v[f[:, 0]], v[f[:, 2]] - v[f[:, 0]])


def face_areas(mesh: TriMesh) -> np.ndarray:
    return 0.5 * np.linalg.norm(face_cross_products(mesh), axis=1)


def face_normals(mesh: TriMesh) -> np.ndarray:
    """Unit normals following the winding order; zero for degenerate faces."""
    cross = face_cross_products(mesh)
    lengths = np.linalg.norm(cross, axis=1)
    out = np.zeros_like(cross)
    ok = lengths > 0
    out[ok] = cross[ok] / lengths[ok, None]
    return out


def enclosed_volume(mesh: TriMesh, face_indices: np.ndarray | None = None) -> float:
    """Signed tetrahedron sum (absolute value). Exact for closed meshes
    with consistent winding, an approximation otherwise."""
    f = mesh.faces if face_indices is None else mesh.faces[face_indices]
    v = mesh.vertices
    signed = np.einsum("ij,ij->i", v[f[:, 0]], np.cross(v[f[:, 1]], v[f[:, 2]]))
    return float(abs(signed.sum()) / 6.0)


def connected_components(mesh: TriMesh) -> list[np.ndarray]:
    """Face groups connected through shared vertices, in order of the
    lowest face index they contain."""
    parent = list(range(mesh.n_vertices))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    for a, b, c in mesh.faces:
        union(int(a), int(b))
        union(int(a), int(c))
    groups: dict[int, list[int]] = {}
    for i, face in enumerate(mesh.faces):
        groups.setdefault(find(int(face[0])), []).append(i)
    return [np.array(g, dtype=np.int64) for g in sorted(groups.values(), key=lambda g: g[0])]


# ---------------------------------------------------------------------------
# surface sampling

def surface_sample(mesh: TriMesh, n: int, seed: int) -> PointCloud:
    """Draw ``n`` points uniformly by area over the mesh surface.

    Faces are chosen proportionally to area via the cumulative-area
    inverse transform; within a face, barycentric coordinates are drawn
    uniformly (the unit square folded onto the triangle). Degenerate
    faces get zero weight. The face normal rides along with each point.
    """
    if n <= 0:
        raise ValueError(f"sample count must be positive, got {n}")
    areas = face_areas(mesh)
    usable = areas.copy()
    usable[usable < DEGENERATE_FACE_AREA] = 0.0
    total = usable.sum()
    if total <= 0.0:
        raise DegenerateMeshError("mesh has no faces with usable area")

    rng = np.random.default_rng(seed)
    cum = np.cumsum(usable)
    picks = np.searchsorted(cum, rng.random(n) * total, side="right")
    picks = np.minimum(picks, len(cum) - 1)

    tri = mesh.vertices[mesh.faces[picks]]
    uv = rng.random((n, 2))
    flip = uv.sum(axis=1) > 1.0
    uv[flip] = 1.0 - uv[flip]
    points = tri[:, 0] + uv[:, 0, None] * (tri[:, 1] - tri[:, 0]) + uv[:, 1, None] * (tri[:, 2] - tri[:, 0])
    normals = face_normals(mesh)[picks]
    return PointCloud(points=points, normals=normals)


# ---------------------------------------------------------------------------
# farthest point sampling

def default_fps_seed(cloud: PointCloud) -> int:
    """Index of the point farthest from the centroid, lowest index on ties."""
    pts = cloud.points
    centroid = pts.mean(axis=0)
    d2 = ((pts - centroid) ** 2).sum(axis=1)
    return int(np.argmax(d2))


def farthest_point_sampling(cloud: PointCloud, k: int, seed_index: int) -> list[int]:
    """Greedy max-min selection of ``k`` point indices.

    Each step adds the point with the largest distance to the selected
    set; ties break toward the lowest index. If ``k`` covers the whole
    cloud the result is the full greedy ordering.
    """
    pts = cloud.points
    n = len(pts)
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    if not 0 <= seed_index < n:
        raise ValueError(f"seed index {seed_index} out of range for {n} points")
    k = min(k, n)
    selected = [seed_index]
    min_d2 = ((pts - pts[seed_index]) ** 2).sum(axis=1)
    for _ in range(k - 1):
        nxt = int(np.argmax(min_d2))
        selected.append(nxt)
        min_d2 = np.minimum(min_d2, ((pts - pts[nxt]) ** 2).sum(axis=1))
    return selected


# ---------------------------------------------------------------------------
# oriented bounding boxes

def _rect_basis_2d(pts2: np.ndarray) -> tuple[np.ndarray, float]:
    """Minimum-area enclosing rectangle direction over 2D points
    (rotating calipers over hull edges). Returns (unit direction, area)."""
    if len(pts2) == 1:
        return np.array([1.0, 0.0]), 0.0
    try:
        hull = ConvexHull(pts2)
        hp = pts2[hull.vertices]
    except QhullError:
        # collinear: the spread direction is the only sensible edge
        spread = pts2 - pts2.mean(axis=0)
        _, _, vt = np.linalg.svd(spread, full_matrices=False)
        d = vt[0]
        norm = np.linalg.norm(d)
        return (d / norm if norm > 0 else np.array([1.0, 0.0])), 0.0
    edges = np.roll(hp, -1, axis=0) - hp
    lengths = np.linalg.norm(edges, axis=1)
    edges = edges[lengths > 0] / lengths[lengths > 0, None]
    best_dir, best_area = np.array([1.0, 0.0]), math.inf
    for d in edges:
        p = np.array([-d[1], d[0]])
        a = hp @ d
        b = hp @ p
        area = (a.max() - a.min()) * (b.max() - b.min())
        if area < best_area - 1e-18:
            best_area, best_dir = area, d
    return best_dir, best_area


def _pca_basis(pts: np.ndarray) -> np.ndarray:
    centered = pts - pts.mean(axis=0)
    cov = centered.T @ centered / max(len(pts), 1)
    _, vecs = np.linalg.eigh(cov)
    return vecs  # columns, ascending eigenvalue


def _extents_for_basis(pts: np.ndarray, basis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    proj = pts @ basis
    lo, hi = proj.min(axis=0), proj.max(axis=0)
    return (hi - lo) / 2.0, basis @ ((lo + hi) / 2.0)


# A hull with more vertices than this gets thinned before the basis
# search; the final extents always use the full point set.
_OBB_SEARCH_LIMIT = 256


def compute_obb(cloud: PointCloud) -> OrientedBoundingBox:
    """Tight oriented bounding box of a point cloud.

    Candidate bases come from the principal axes plus, when the cloud
    spans 3D, frames flush with convex hull faces (face normal + the
    minimum-area rectangle of the projected hull). PCA alone cannot
    orient shapes with isotropic covariance, e.g. a rotated cube, which
    the hull-flush candidates recover exactly. The smallest-volume
    candidate wins; half extents are then sorted longest-first.
    """
    pts = cloud.points
    candidates = [_pca_basis(pts)]
    if len(pts) >= 4:
        try:
            hull = ConvexHull(pts)
        except QhullError:
            hull = None
        if hull is not None:
            hv = pts[np.sort(hull.vertices)]
            if len(hv) > _OBB_SEARCH_LIMIT:
                step = int(math.ceil(len(hv) / _OBB_SEARCH_LIMIT))
                hv = hv[::step]
            try:
                search_hull = ConvexHull(hv)
            except QhullError:
                search_hull = None
            if search_hull is not None:
                normals = search_hull.equations[:, :3]
                seen: set[tuple[int, int, int]] = set()
                for n in normals:
                    length = np.linalg.norm(n)
                    if length == 0:
                        continue
                    n = n / length
                    key = tuple(np.round(np.abs(n) * 1e6).astype(int))
                    if key in seen:
                        continue
                    seen.add(key)
                    # any fixed perpendicular pair will do; calipers pick the in-plane turn
                    ref = np.eye(3)[int(np.argmin(np.abs(n)))]
                    u = np.cross(n, ref)
                    u /= np.linalg.norm(u)
                    v = np.cross(n, u)
                    plane = hv @ np.column_stack([u, v])
                    d2, _ = _rect_basis_2d(plane)
                    e1 = d2[0] * u + d2[1] * v
                    e2 = np.cross(n, e1)
                    candidates.append(np.column_stack([e1, e2, n]))

    best = None
    best_volume = math.inf
    for basis in candidates:
        half, _ = _extents_for_basis(pts, basis)
        volume = float(np.prod(np.maximum(half, 1e-12)))
        if volume < best_volume * (1.0 - 1e-12):
            best_volume = volume
            best = basis
    assert best is not None
    half, center = _extents_for_basis(pts, best)
    order = np.argsort(-half, kind="stable")
    basis = best[:, order]
    half = half[order]
    if np.linalg.det(basis) < 0:
        basis = basis.copy()
        basis[:, 2] = -basis[:, 2]
    return OrientedBoundingBox(center=center, rotation=basis, half_extents=half)


def longest_obb_axis(mesh: TriMesh) -> float:
    """Longest side of the vertex-cloud bounding box (deterministic,
    no sampling involved)."""
    obb = compute_obb(PointCloud(points=mesh.vertices))
    return float(2.0 * obb.half_extents[0])


def rescale_to_dims(mesh: TriMesh, target_longest_axis: float) -> tuple[TriMesh, float]:
    """Uniformly scale so the longest bounding-box side equals the target."""
    if not math.isfinite(target_longest_axis) or target_longest_axis <= 0:
        raise ValueError(f"target size must be positive, got {target_longest_axis!r}")
    current = longest_obb_axis(mesh)
    if current <= 0:
        raise DegenerateMeshError("mesh has zero extent; cannot rescale")
    scale = target_longest_axis / current
    return TriMesh(mesh.vertices * scale, mesh.faces), scale


# ---------------------------------------------------------------------------
# placement

_AXES = {"x": np.array([1.0, 0.0, 0.0]), "y": np.array([0.0, 1.0, 0.0]), "z": np.array([0.0, 0.0, 1.0])}


def _up_vector(up_axis) -> np.ndarray:
    if isinstance(up_axis, str):
        try:
            return _AXES[up_axis.lower()]
        except KeyError:
            raise ValueError(f"unknown axis name {up_axis!r}") from None
    up = np.asarray(up_axis, dtype=np.float64)
    norm = np.linalg.norm(up)
    if up.shape != (3,) or norm == 0:
        raise ValueError("up axis must be a named axis or a nonzero 3-vector")
    return up / norm


def collision_radius(mesh: TriMesh, up_axis="z") -> float:
    """Largest horizontal vertex distance from the projected centroid.

    The collision circle is centered at the projected centroid of the
    vertex set; any yaw of the asset stays inside it.
    """
    up = _up_vector(up_axis)
    verts = mesh.vertices
    horizontal = verts - np.outer(verts @ up, up)
    centroid = horizontal.mean(axis=0)
    delta = horizontal - centroid
    radius = float(np.sqrt((delta**2).sum(axis=1)).max())
    if radius <= 0.0:
        raise DegenerateMeshError("all vertices project to one point; no collision footprint")
    return radius


def projected_centroid(mesh: TriMesh, up_axis="z") -> np.ndarray:
    up = _up_vector(up_axis)
    verts = mesh.vertices
    horizontal = verts - np.outer(verts @ up, up)
    return horizontal.mean(axis=0)


def make_placement(mesh: TriMesh) -> PlacementAnnotation:
    """Resting annotation for a z-up asset: shift the projected centroid
    onto the support point and the lowest vertex onto the surface."""
    centroid = projected_centroid(mesh, "z")
    z_min = float(mesh.vertices[:, 2].min())
    return PlacementAnnotation(
        position=(float(-centroid[0]), float(-centroid[1]), -z_min),
        orientation=(1.0, 0.0, 0.0, 0.0),
        collision_radius=collision_radius(mesh, "z"),
    )


def check_placement(mesh: TriMesh, placement: PlacementAnnotation, tol: float = 1e-9) -> None:
    """Raise if the collision circle fails to cover the horizontal
    footprint of the mesh about the placement origin."""
    shifted = mesh.vertices + np.array(placement.position)
    spread = float(np.sqrt((shifted[:, :2] ** 2).sum(axis=1)).max())
    if spread > placement.collision_radius + tol:
        raise ValueError(
            f"collision radius {placement.collision_radius!r} does not cover footprint {spread!r}"
        )


# ---------------------------------------------------------------------------
# rotations

def quat_to_matrix(quat: Quat) -> np.ndarray:
    w, x, y, z = quat
    return Rotation.from_quat([x, y, z, w]).as_matrix()


def matrix_to_quat(matrix: np.ndarray) -> Quat:
    x, y, z, w = Rotation.from_matrix(matrix).as_quat()
    if w < 0:  # canonical hemisphere keeps manifests stable
        w, x, y, z = -w, -x, -y, -z
    return (float(w), float(x), float(y), float(z))


def quat_geodesic_angle(a: Quat, b: Quat) -> float:
    """Rotation angle between two unit quaternions, in [0, pi]."""
    dot = abs(a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3])
    return 2.0 * math.acos(min(1.0, dot))
