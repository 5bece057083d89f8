"""Reduce raw grasp proposals to a diverse, semantically grounded set.

Proposals are filtered by distance to annotated points, thinned with
farthest point sampling over the 7-DoF pose metric, then tagged with
their nearest functional and grasp points.
"""

from __future__ import annotations

import math
from dataclasses import replace
from typing import Sequence

import numpy as np

from .geometry import quat_geodesic_angle
from .model import FunctionalPoint, GraspPoint, GraspPose

PROXIMITY_THRESHOLD = 0.03  # meters from a grasp to the nearest annotated point
GRASP_FPS_K = 100
# Exchange rate between position error (m) and rotation error (rad) in
# the pose metric: 1 rad of rotation counts like 5 cm of translation.
ROTATION_WEIGHT = 0.05


def _positions(points: Sequence) -> np.ndarray:
    out = np.array([getattr(p, "position", p) for p in points], dtype=np.float64)
    return out.reshape(-1, 3)


def proximity_filter(
    grasps: Sequence[GraspPose],
    selected_points: Sequence,
    threshold: float = PROXIMITY_THRESHOLD,
) -> tuple[GraspPose, ...]:
    """Keep grasps within ``threshold`` of any annotated point (inclusive).

    ``selected_points`` may be point records or bare coordinates. Order
    is preserved; an empty point set keeps nothing.
    """
    if threshold < 0:
        raise ValueError(f"threshold must be non-negative, got {threshold}")
    if not grasps:
        return ()
    if not len(selected_points):
        return ()
    anchors = _positions(selected_points)
    centers = _positions([g.position for g in grasps])
    d2 = ((centers[:, None, :] - anchors[None, :, :]) ** 2).sum(axis=2).min(axis=1)
    keep = d2 <= threshold * threshold
    return tuple(g for g, k in zip(grasps, keep) if k)


def pose_distance(a: GraspPose, b: GraspPose, rotation_weight: float = ROTATION_WEIGHT) -> float:
    """Position distance plus weighted geodesic rotation angle."""
    dp = math.sqrt(
        (a.position[0] - b.position[0]) ** 2
        + (a.position[1] - b.position[1]) ** 2
        + (a.position[2] - b.position[2]) ** 2
    )
    return dp + rotation_weight * quat_geodesic_angle(a.orientation, b.orientation)


def fps_7dof(
    grasps: Sequence[GraspPose],
    k: int = GRASP_FPS_K,
    rotation_weight: float = ROTATION_WEIGHT,
) -> tuple[GraspPose, ...]:
    """Greedy max-min selection of ``k`` grasps under the pose metric.

    Seeded at the highest-confidence grasp (lowest index on ties); ties
    in the max-min step also break toward the lowest index. When ``k``
    covers every grasp, the full set comes back in selection order.
    """
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    n = len(grasps)
    if n == 0:
        return ()
    k = min(k, n)

    positions = np.array([g.position for g in grasps], dtype=np.float64)
    quats = np.array([g.orientation for g in grasps], dtype=np.float64)

    def distances_from(idx: int) -> np.ndarray:
        dp = np.sqrt(((positions - positions[idx]) ** 2).sum(axis=1))
        dots = np.abs(quats @ quats[idx])
        ang = 2.0 * np.arccos(np.minimum(1.0, dots))
        return dp + rotation_weight * ang

    confidences = np.array([g.confidence for g in grasps])
    seed = int(np.argmax(confidences))
    selected = [seed]
    min_d = distances_from(seed)
    for _ in range(k - 1):
        nxt = int(np.argmax(min_d))
        selected.append(nxt)
        min_d = np.minimum(min_d, distances_from(nxt))
    return tuple(grasps[i] for i in selected)


def associate_semantics(
    grasps: Sequence[GraspPose],
    functional_points: Sequence[FunctionalPoint],
    grasp_points: Sequence[GraspPoint],
) -> tuple[GraspPose, ...]:
    """Tag each grasp with its nearest functional and grasp point ids.

    Nearest by Euclidean distance to the grasp position; ties break
    toward the lowest id. Either point list may be empty (association
    skipped for that kind) but not both.
    """
    if not functional_points and not grasp_points:
        raise ValueError("cannot associate semantics without any annotated points")

    def nearest_id(points: Sequence, position) -> int | None:
        if not points:
            return None
        best_id = None
        best_d2 = math.inf
        for p in sorted(points, key=lambda p: p.id):
            d2 = (
                (p.position[0] - position[0]) ** 2
                + (p.position[1] - position[1]) ** 2
                + (p.position[2] - position[2]) ** 2
            )
            if d2 < best_d2:
                best_d2 = d2
                best_id = p.id
        return best_id

    out = []
    for g in grasps:
        out.append(
            replace(
                g,
                associated_functional_point=nearest_id(functional_points, g.position),
                associated_grasp_point=nearest_id(grasp_points, g.position),
            )
        )
    return tuple(out)
