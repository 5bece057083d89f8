"""Geometry kernel tests.

The sampling and box-fitting routines are checked against independent
brute-force oracles written here, not against the library's own
internals: greedy max-min selection re-derived with plain loops,
collision radii from per-vertex distances, scale factors by hand.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from assetforge.geometry import (
    PointCloud,
    TriMesh,
    collision_radius,
    compute_obb,
    connected_components,
    default_fps_seed,
    face_areas,
    farthest_point_sampling,
    load_mesh,
    make_placement,
    matrix_to_quat,
    quat_geodesic_angle,
    quat_to_matrix,
    rescale_to_dims,
    surface_sample,
    write_obj,
)
from assetforge.primitives import box_mesh, icosphere_mesh, merge_meshes, with_degenerate_faces


def greedy_fps_oracle(points: np.ndarray, k: int, seed_index: int) -> list[int]:
    """Plain-loop greedy max-min on squared distances; ties to the
    lowest index. Deliberately mirrors nothing from the library."""
    n = len(points)
    chosen = [seed_index]
    while len(chosen) < min(k, n):
        best_idx, best_d = -1, -1.0
        for i in range(n):
            if i in chosen:
                continue
            d = min(float(np.sum((points[i] - points[j]) ** 2)) for j in chosen)
            if d > best_d:
                best_idx, best_d = i, d
        chosen.append(best_idx)
    return chosen


class TestFarthestPointSampling:
    def test_collinear_frozen(self):
        pts = np.array([[float(x), 0.0, 0.0] for x in range(11)])
        cloud = PointCloud(points=pts, normals=None)
        assert farthest_point_sampling(cloud, 3, seed_index=0) == [0, 10, 5]

    def test_matches_bruteforce_oracle(self):
        rng = np.random.default_rng(42)
        for trial in range(25):
            n = int(rng.integers(2, 40))
            pts = rng.uniform(-1, 1, size=(n, 3))
            cloud = PointCloud(points=pts, normals=None)
            k = int(rng.integers(1, n + 1))
            seed = int(rng.integers(0, n))
            assert farthest_point_sampling(cloud, k, seed) == greedy_fps_oracle(pts, k, seed)

    def test_k_not_larger_than_n(self):
        pts = np.eye(3)
        cloud = PointCloud(points=pts, normals=None)
        assert sorted(farthest_point_sampling(cloud, 10, 0)) == [0, 1, 2]

    def test_min_pairwise_distance_nonincreasing_in_k(self):
        rng = np.random.default_rng(7)
        pts = rng.uniform(-1, 1, size=(30, 3))
        cloud = PointCloud(points=pts, normals=None)

        def min_pair(sel):
            d = [
                float(np.linalg.norm(pts[a] - pts[b]))
                for i, a in enumerate(sel)
                for b in sel[i + 1 :]
            ]
            return min(d)

        last = math.inf
        for k in range(2, 15):
            sel = farthest_point_sampling(cloud, k, seed_index=0)
            current = min_pair(sel)
            assert current <= last + 1e-12
            last = current

    def test_default_seed_is_farthest_from_centroid(self):
        pts = np.array([[0, 0, 0], [1, 0, 0], [10, 0, 0], [2, 0, 0]], dtype=float)
        cloud = PointCloud(points=pts, normals=None)
        assert default_fps_seed(cloud) == 2


class TestSurfaceSampling:
    def two_triangle_mesh(self):
        # right triangles with legs (1,1) and (sqrt 3, sqrt 3): areas 1:3
        verts = np.array(
            [
                [0, 0, 0], [1, 0, 0], [0, 2, 0],
                [3, 0, 0], [3 + math.sqrt(3), 0, 0], [3, 2 * math.sqrt(3), 0],
            ],
            dtype=float,
        )
        faces = np.array([[0, 1, 2], [3, 4, 5]])
        return TriMesh(vertices=verts, faces=faces)

    def test_area_proportional_share(self):
        mesh = self.two_triangle_mesh()
        areas = face_areas(mesh)
        assert areas[1] / areas[0] == pytest.approx(3.0, rel=1e-9)
        cloud = surface_sample(mesh, 20000, seed=3)
        big = np.sum(cloud.points[:, 0] >= 2.0)  # the big triangle lives at x >= 3
        assert 0.73 <= big / 20000 <= 0.77

    def test_points_lie_on_surface(self):
        mesh = box_mesh(0.2, 0.1, 0.05)
        cloud = surface_sample(mesh, 500, seed=1)
        hx, hy, hz = 0.1, 0.05, 0.025
        pts = np.abs(cloud.points)
        on_face = (
            np.isclose(pts[:, 0], hx) | np.isclose(pts[:, 1], hy) | np.isclose(pts[:, 2], hz)
        )
        assert on_face.all()
        inside = (pts[:, 0] <= hx + 1e-12) & (pts[:, 1] <= hy + 1e-12) & (pts[:, 2] <= hz + 1e-12)
        assert inside.all()

    def test_normals_unit_and_outward_on_sphere(self):
        mesh = icosphere_mesh(0.05, subdivisions=2)
        cloud = surface_sample(mesh, 400, seed=5)
        lengths = np.linalg.norm(cloud.normals, axis=1)
        assert np.allclose(lengths, 1.0, atol=1e-9)
        radial = cloud.points / np.linalg.norm(cloud.points, axis=1, keepdims=True)
        assert (np.einsum("ij,ij->i", radial, cloud.normals) > 0.9).all()

    def test_deterministic_per_seed(self):
        mesh = box_mesh(0.1, 0.1, 0.1)
        a = surface_sample(mesh, 200, seed=9)
        b = surface_sample(mesh, 200, seed=9)
        c = surface_sample(mesh, 200, seed=10)
        assert np.array_equal(a.points, b.points)
        assert not np.array_equal(a.points, c.points)

    def test_degenerate_faces_get_no_samples(self):
        mesh = with_degenerate_faces(box_mesh(0.1, 0.1, 0.1), 5)
        cloud = surface_sample(mesh, 300, seed=2)
        h = 0.05
        pts = np.abs(cloud.points)
        on_face = (
            np.isclose(pts[:, 0], h) | np.isclose(pts[:, 1], h) | np.isclose(pts[:, 2], h)
        )
        assert on_face.all()

    def test_empty_request(self):
        with pytest.raises(ValueError):
            surface_sample(box_mesh(0.1, 0.1, 0.1), 0, seed=0)


class TestOrientedBoundingBox:
    def test_axis_aligned_box(self):
        mesh = box_mesh(0.4, 0.2, 0.1)
        cloud = PointCloud(points=mesh.vertices, normals=None)
        obb = compute_obb(cloud)
        assert np.allclose(sorted(obb.half_extents, reverse=True), [0.2, 0.1, 0.05], atol=1e-9)
        assert np.allclose(obb.center, [0, 0, 0], atol=1e-9)

    def test_half_extents_sorted_and_rotation_orthonormal(self):
        rng = np.random.default_rng(3)
        cloud = PointCloud(points=rng.normal(size=(60, 3)), normals=None)
        obb = compute_obb(cloud)
        he = obb.half_extents
        assert he[0] >= he[1] >= he[2] > 0
        R = np.asarray(obb.rotation)
        assert np.allclose(R @ R.T, np.eye(3), atol=1e-9)
        assert np.linalg.det(R) == pytest.approx(1.0, abs=1e-9)

    def test_rotated_box_recovers_volume(self):
        mesh = box_mesh(0.3, 0.2, 0.1)
        angle = 0.41
        R = np.array(
            [
                [math.cos(angle), -math.sin(angle), 0],
                [math.sin(angle), math.cos(angle), 0],
                [0, 0, 1],
            ]
        )
        pts = mesh.vertices @ R.T
        obb = compute_obb(PointCloud(points=pts, normals=None))
        volume = 8 * np.prod(obb.half_extents)
        assert volume == pytest.approx(0.3 * 0.2 * 0.1, rel=1e-6)

    def test_contains_all_points(self):
        rng = np.random.default_rng(8)
        for trial in range(5):
            pts = rng.uniform(-1, 1, size=(40, 3)) * rng.uniform(0.1, 2.0, size=3)
            obb = compute_obb(PointCloud(points=pts, normals=None))
            local = (pts - np.asarray(obb.center)) @ np.asarray(obb.rotation)
            assert (np.abs(local) <= np.asarray(obb.half_extents) + 1e-7).all()


class TestRescale:
    def test_known_scale_factor(self):
        mesh = box_mesh(0.37, 0.1, 0.05)
        scaled, factor = rescale_to_dims(mesh, 0.05)
        assert factor == pytest.approx(0.05 / 0.37, rel=1e-12)
        assert np.max(scaled.vertices[:, 0]) - np.min(scaled.vertices[:, 0]) == pytest.approx(
            0.05, rel=1e-9
        )

    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=30, deadline=None)
    def test_uniform_scaling_preserves_shape(self, seed):
        rng = np.random.default_rng(seed)
        verts = rng.uniform(-0.5, 0.5, size=(8, 3))
        faces = np.array([[0, 1, 2], [3, 4, 5], [5, 6, 7]])
        mesh = TriMesh(vertices=verts, faces=faces)
        target = float(rng.uniform(0.01, 1.0))
        scaled, factor = rescale_to_dims(mesh, target)
        before = np.linalg.norm(verts[:, None] - verts[None, :], axis=-1)
        after = np.linalg.norm(scaled.vertices[:, None] - scaled.vertices[None, :], axis=-1)
        nz = before > 1e-12
        ratios = after[nz] / before[nz]
        assert np.allclose(ratios, factor, rtol=1e-9)


class TestPlacement:
    def test_collision_radius_matches_vertex_loop(self):
        mesh = box_mesh(0.3, 0.2, 0.1, center=(0.05, -0.02, 0.3))
        radius = collision_radius(mesh)
        centroid = mesh.vertices.mean(axis=0)
        best = max(
            math.hypot(v[0] - centroid[0], v[1] - centroid[1]) for v in mesh.vertices
        )
        assert radius == pytest.approx(best, rel=1e-12)

    def test_make_placement_fields(self):
        mesh = box_mesh(0.2, 0.2, 0.1, center=(0, 0, 0.05))
        placement = make_placement(mesh)
        placement.validate()
        assert placement.collision_radius > 0
        assert placement.position[2] == pytest.approx(0.0, abs=1e-9)


class TestMeshIO:
    def test_obj_roundtrip_bit_identical(self):
        rng = np.random.default_rng(0)
        verts = rng.uniform(-1, 1, size=(20, 3))
        faces = np.array([[0, 1, 2], [4, 5, 6], [10, 11, 12]])
        mesh = TriMesh(vertices=verts, faces=faces)
        back = load_mesh(write_obj(mesh))
        assert np.array_equal(back.vertices, mesh.vertices)
        assert np.array_equal(back.faces, mesh.faces)

    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=25, deadline=None)
    def test_obj_roundtrip_randomized(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 30))
        verts = rng.normal(scale=rng.uniform(1e-3, 1e3), size=(n, 3))
        faces = np.array(
            [rng.choice(n, size=3, replace=False) for _ in range(int(rng.integers(1, 10)))]
        )
        mesh = TriMesh(vertices=verts, faces=faces)
        back = load_mesh(write_obj(mesh))
        assert np.array_equal(back.vertices, mesh.vertices)
        assert np.array_equal(back.faces, mesh.faces)

    def test_load_rejects_bad_vertex(self):
        with pytest.raises(Exception):
            load_mesh(b"v 0 0 zero\nf 1 2 3\n")

    def test_connected_components(self):
        merged = merge_meshes(
            box_mesh(0.05, 0.05, 0.05, center=(-0.2, 0, 0)),
            box_mesh(0.05, 0.05, 0.05, center=(0.2, 0, 0)),
        )
        assert len(connected_components(merged)) == 2
        assert len(connected_components(box_mesh(0.1, 0.1, 0.1))) == 1


class TestQuaternions:
    def test_matrix_roundtrip(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            q = rng.normal(size=4)
            q = tuple(float(v) for v in q / np.linalg.norm(q))
            R = quat_to_matrix(q)
            assert np.allclose(R @ R.T, np.eye(3), atol=1e-12)
            back = matrix_to_quat(R)
            # q and -q encode the same rotation
            assert quat_geodesic_angle(q, back) == pytest.approx(0.0, abs=1e-7)

    def test_geodesic_angle_quarter_turn(self):
        identity = (1.0, 0.0, 0.0, 0.0)
        half = math.sqrt(0.5)
        quarter_z = (half, 0.0, 0.0, half)
        assert quat_geodesic_angle(identity, quarter_z) == pytest.approx(math.pi / 2, rel=1e-12)
        assert quat_geodesic_angle(identity, identity) == 0.0
