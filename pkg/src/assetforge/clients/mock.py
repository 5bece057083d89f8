"""Deterministic stand-in for the hosted annotation models.

The mock answers every annotation call from mesh geometry and a fixture
table, so pipeline runs are reproducible offline. Where the hosted
models would reason over renders, the mock applies simple geometric
rules documented on each method.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np
from scipy.spatial import cKDTree

from ..errors import DegenerateMeshError
from ..geometry import (
    compute_obb,
    connected_components,
    enclosed_volume,
    face_areas,
    matrix_to_quat,
    surface_sample,
    DEGENERATE_FACE_AREA,
)
from ..model import (
    FunctionalPoint,
    GraspPoint,
    GraspPose,
    GripperModel,
    PhysicalProperties,
    PointCloud,
    SemanticCaption,
    TriMesh,
)
from ..render import RenderView
from .base import (
    GATE_LOW_VISUAL_QUALITY,
    GATE_NOT_SINGLE_OBJECT,
    GateResult,
    PointSelection,
    PropertyEstimate,
    SelectionBounds,
)

# Friction by declared material. Values sit well inside the valid
# [0, 2] range; unknown materials get the neutral default.
MATERIAL_FRICTION = {
    "plastic": 0.3,
    "rubber": 0.5,
    "metal": 0.4,
    "wood": 0.45,
    "ceramic": 0.35,
    "glass": 0.25,
}
DEFAULT_FRICTION = 0.5
DEFAULT_DENSITY = 500.0  # kg/m^3, light household-object average
FALLBACK_FILL_FACTOR = 0.3

# Size buckets over the longest bounding-box side.
SIZE_BUCKETS = ((0.1, "small"), (0.25, "medium"), (math.inf, "large"))

# Auto-fixture vocabulary, hashed per asset id.
_CATEGORIES = (
    ("mug", "holds liquids for drinking", "cylindrical"),
    ("bottle", "stores and pours liquids", "elongated"),
    ("box", "contains and protects items", "rectangular"),
    ("bowl", "holds food or small items", "rounded"),
    ("hammer", "drives nails and fasteners", "elongated"),
    ("can", "preserves food or drink", "cylindrical"),
    ("toy block", "stacks for play and building", "rectangular"),
    ("jar", "stores goods under a sealed lid", "cylindrical"),
    ("stapler", "binds sheets of paper", "compact"),
    ("remote", "controls devices from a distance", "flat"),
)
_COLORS = ("red", "blue", "green", "yellow", "black", "white", "orange", "gray")
_MATERIALS = tuple(MATERIAL_FRICTION)

_FUNCTIONAL_RULES = (
    ("top", "highest reachable point on the object", 0.9),
    ("base", "support surface at the bottom", 0.85),
    ("rim", "outermost edge around the vertical axis", 0.8),
    ("side", "lateral face for pushing or steadying", 0.75),
)
_GRASP_RULES = (
    ("parallel-jaw", "general pick-and-place"),
    ("pinch", "precision reorientation"),
    ("power", "firm hold for transport"),
)

_ANTIPODAL_MAX_ANGLE = math.radians(30.0)
# Upper bound on candidate pairs examined per proposal call; keeps the
# sampler bounded on clouds where no valid pair exists.
_MAX_PAIR_CHECKS = 2_000_000


def _id_hash(asset_id: str, salt: str = "") -> int:
    digest = hashlib.sha256(f"{salt}:{asset_id}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def auto_fixture(asset_id: str) -> dict[str, str | float]:
    """Deterministic caption fixture derived from the asset id alone."""
    h = _id_hash(asset_id, "fixture")
    category, function, shape = _CATEGORIES[h % len(_CATEGORIES)]
    color = _COLORS[(h // 7) % len(_COLORS)]
    material = _MATERIALS[(h // 61) % len(_MATERIALS)]
    size_m = 0.05 + ((h // 397) % 1000) / 999.0 * 0.30
    return {
        "category": category,
        "color": color,
        "material": material,
        "shape": shape,
        "function": function,
        "target_longest_axis": size_m,
    }


@dataclass
class MockAnnotationClient:
    """Geometry-driven annotation rules; see method docstrings.

    ``caption_fixtures`` maps asset ids to caption fields (category,
    color, material, shape, function and optionally a target size).
    With ``auto_fixtures`` enabled, missing entries are synthesized from
    the asset id hash; otherwise a missing entry is an error.
    """

    caption_fixtures: Mapping[str, Mapping[str, str | float]] = field(default_factory=dict)
    auto_fixtures: bool = True
    density: float = DEFAULT_DENSITY
    degenerate_face_limit: float = 0.3
    component_volume_floor: float = 0.05
    selection_bounds: SelectionBounds = field(default_factory=SelectionBounds)

    def fixture_for(self, asset_id: str) -> Mapping[str, str | float]:
        if asset_id in self.caption_fixtures:
            return self.caption_fixtures[asset_id]
        if self.auto_fixtures:
            return auto_fixture(asset_id)
        raise KeyError(f"no caption fixture for asset {asset_id!r}")

    # -- gate ---------------------------------------------------------------

    def quality_gate(self, asset_id: str, mesh: TriMesh, views: Sequence[RenderView]) -> GateResult:
        """Reject multi-body meshes and meshes dominated by degenerate faces.

        A mesh fails as ``not_single_object`` when more than one
        connected component holds over ``component_volume_floor`` of the
        total enclosed volume (tiny debris shells are tolerated), and as
        ``low_visual_quality`` when the degenerate-face ratio exceeds
        ``degenerate_face_limit``.
        """
        reasons = []
        components = connected_components(mesh)
        if len(components) > 1:
            volumes = np.array([enclosed_volume(mesh, comp) for comp in components])
            total = volumes.sum()
            if total > 0:
                shares = volumes / total
            else:  # open shells: fall back to area share
                areas = face_areas(mesh)
                comp_areas = np.array([areas[comp].sum() for comp in components])
                shares = comp_areas / max(comp_areas.sum(), 1e-30)
            if int((shares > self.component_volume_floor).sum()) > 1:
                reasons.append(GATE_NOT_SINGLE_OBJECT)
        areas = face_areas(mesh)
        ratio = float((areas < DEGENERATE_FACE_AREA).mean())
        if ratio > self.degenerate_face_limit:
            reasons.append(GATE_LOW_VISUAL_QUALITY)
        return GateResult(passed=not reasons, reasons=tuple(reasons))

    # -- properties ----------------------------------------------------------

    def estimate_properties(
        self, asset_id: str, mesh: TriMesh, views: Sequence[RenderView]
    ) -> PropertyEstimate:
        """Bounding box from a fixed-seed surface sample, mass from the
        enclosed volume at ``density``. A non-positive volume (open or
        inconsistent shells) falls back to 30% of the box volume and is
        noted for provenance."""
        cloud = surface_sample(mesh, 4096, seed=0)
        obb = compute_obb(cloud)
        dims = obb.dims
        volume = enclosed_volume(mesh)
        notes: tuple[str, ...] = ()
        if volume <= 0.0:
            volume = dims[0] * dims[1] * dims[2] * FALLBACK_FILL_FACTOR
            notes = ("mass_fallback: enclosed volume unusable, used obb volume x 0.3 fill factor",)
        if volume <= 0.0:
            raise DegenerateMeshError("mesh encloses no volume and its bounding box is flat")
        fixture = self.fixture_for(asset_id)
        material = str(fixture.get("material", ""))
        friction = MATERIAL_FRICTION.get(material, DEFAULT_FRICTION)
        props = PhysicalProperties(obb_dims=dims, mass=volume * self.density, friction=friction)
        props.validate()
        return PropertyEstimate(properties=props, notes=notes)

    # -- caption ---------------------------------------------------------------

    def caption(self, asset_id: str, mesh: TriMesh, views: Sequence[RenderView]) -> SemanticCaption:
        """Fixture-backed caption; the size bucket alone is measured."""
        fixture = self.fixture_for(asset_id)
        longest = 2.0 * float(compute_obb(surface_sample(mesh, 2048, seed=0)).half_extents[0])
        size = next(name for limit, name in SIZE_BUCKETS if longest < limit)
        caption = SemanticCaption(
            category=str(fixture["category"]),
            color=str(fixture["color"]),
            material=str(fixture["material"]),
            size=size,
            shape=str(fixture["shape"]),
            function=str(fixture["function"]),
        )
        caption.validate()
        return caption

    # -- point selection ---------------------------------------------------------

    def select_points(
        self, asset_id: str, candidates: PointCloud, views: Sequence[RenderView]
    ) -> PointSelection:
        """Pick functional and grasp points by fixed geometric rules.

        Functional picks, in order: highest point ("top"), lowest
        ("base"), farthest from the vertical through the candidate
        centroid ("rim"), most forward ("side"). Grasp picks are the
        candidates nearest the centroid. The candidate mean stands in
        for the volume centroid since only the candidate set is visible
        here. Picks never repeat an index.
        """
        bounds = self.selection_bounds
        pts = candidates.points
        k = len(pts)
        if k < bounds.min_functional + bounds.min_grasp:
            raise ValueError(
                f"need at least {bounds.min_functional + bounds.min_grasp} candidates, got {k}"
            )
        n_functional = min(bounds.max_functional, k - bounds.min_grasp)
        n_grasp = min(bounds.max_grasp, k - n_functional)

        centroid = pts.mean(axis=0)
        radial = np.sqrt(((pts - centroid)[:, :2] ** 2).sum(axis=1))
        scores = (pts[:, 2], -pts[:, 2], radial, pts[:, 0])

        used: set[int] = set()

        def pick(score: np.ndarray) -> int:
            order = np.argsort(-score, kind="stable")
            for idx in order:
                if int(idx) not in used:
                    used.add(int(idx))
                    return int(idx)
            raise RuntimeError("candidate pool exhausted")

        functional = []
        functional_idx = []
        for i in range(n_functional):
            label, rationale, confidence = _FUNCTIONAL_RULES[i % len(_FUNCTIONAL_RULES)]
            idx = pick(scores[i % len(scores)])
            functional_idx.append(idx)
            functional.append(
                FunctionalPoint(
                    id=i,
                    position=tuple(float(v) for v in pts[idx]),
                    function_label=label,
                    confidence=confidence,
                    rationale=rationale,
                )
            )

        grasp = []
        grasp_idx = []
        to_centroid = np.sqrt(((pts - centroid) ** 2).sum(axis=1))
        for i in range(n_grasp):
            grasp_type, scenario = _GRASP_RULES[i % len(_GRASP_RULES)]
            idx = pick(-to_centroid)
            grasp_idx.append(idx)
            grasp.append(
                GraspPoint(
                    id=i,
                    position=tuple(float(v) for v in pts[idx]),
                    grasp_type=grasp_type,
                    use_scenario=scenario,
                )
            )

        selection = PointSelection(
            functional_points=tuple(functional),
            grasp_points=tuple(grasp),
            functional_indices=tuple(functional_idx),
            grasp_indices=tuple(grasp_idx),
        )
        selection.validate(candidate_count=k)
        return selection

    # -- grasp proposals --------------------------------------------------------

    def propose_grasps(
        self, asset_id: str, cloud: PointCloud, gripper: GripperModel, max_n: int = 4000, seed: int = 0
    ) -> tuple[GraspPose, ...]:
        """Antipodal pair sampling over the surface cloud.

        A pair qualifies when the two normals are within 30 degrees of
        opposite and the points fit inside the jaw opening. The grasp
        sits at the pair midpoint with the jaw along the pair axis and
        the approach pointing back toward the cloud centroid side, so
        the gripper body stays outside the object. Confidence is the
        cosine of the antipodal deviation. Deterministic per seed; an
        empty result means no qualifying pair was found.
        """
        if cloud.normals is None:
            raise ValueError("grasp proposal needs per-point normals")
        if max_n <= 0:
            raise ValueError(f"max_n must be positive, got {max_n}")
        pts = cloud.points
        normals = cloud.normals
        n = len(pts)
        centroid = pts.mean(axis=0)
        cos_limit = math.cos(_ANTIPODAL_MAX_ANGLE)

        rng = np.random.default_rng(seed)
        order = rng.permutation(n)
        tree = cKDTree(pts)

        grasps: list[GraspPose] = []
        checks = 0
        for i in order:
            i = int(i)
            neighbors = sorted(tree.query_ball_point(pts[i], gripper.max_opening))
            checks += len(neighbors)
            for j in neighbors:
                if j <= i:
                    continue
                alignment = -float(normals[i] @ normals[j])
                if alignment < cos_limit:
                    continue
                grasps.append(self._pair_to_grasp(pts[i], pts[j], centroid, alignment))
                if len(grasps) >= max_n:
                    return tuple(grasps)
            if checks >= _MAX_PAIR_CHECKS:
                break
        return tuple(grasps)

    @staticmethod
    def _pair_to_grasp(p_i: np.ndarray, p_j: np.ndarray, centroid: np.ndarray, alignment: float) -> GraspPose:
        center = (p_i + p_j) / 2.0
        jaw = p_j - p_i
        jaw = jaw / np.linalg.norm(jaw)
        outward = center - centroid
        outward = outward - (outward @ jaw) * jaw
        norm = np.linalg.norm(outward)
        if norm < 1e-9:
            # grasp centered on the object: fall back to the axis least
            # aligned with the jaw for a deterministic approach direction
            ref = np.eye(3)[int(np.argmin(np.abs(jaw)))]
            outward = ref - (ref @ jaw) * jaw
            norm = np.linalg.norm(outward)
        outward = outward / norm
        approach = -outward  # palm-to-fingertip direction, into the object
        y_axis = np.cross(approach, jaw)
        rotation = np.column_stack([jaw, y_axis, approach])
        return GraspPose(
            position=tuple(float(v) for v in center),
            orientation=matrix_to_quat(rotation),
            confidence=float(min(1.0, max(0.0, alignment))),
        )
