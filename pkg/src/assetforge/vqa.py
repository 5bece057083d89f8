"""Grounded question/answer synthesis over tabletop scenes.

Every pair is built from recomputable scene geometry: the question
comes from a fixed template, the grounding block records the asset ids
and numbers the answer depends on, and the answer itself is rendered
from the grounding through ``render_answer``. Re-deriving the grounding
from the layout and re-rendering must reproduce the stored answer
exactly; that round trip is the correctness oracle.

Five categories:

- ``detection``: count objects sharing a caption attribute.
- ``language_grounding``: name an object by attributes, answer with
  its grasp type.
- ``functional_planning``: report a functional point and whether the
  straight front approach to the object is blocked.
- ``scene_understanding``: clearance to the nearest neighbor circle.
- ``task_planning``: sweep the object's collision circle along an
  axis-aligned two-leg displacement and report collision risk.

Occlusion and sweeps are 2D over collision circles; yaw never matters.
"""

from __future__ import annotations

import json
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import ValidationError
from .layout import SceneLayout
from .model import AssetRecord, _extra, _fail, _require, _str

VQA_CATEGORIES = (
    "language_grounding",
    "functional_planning",
    "scene_understanding",
    "task_planning",
    "detection",
)

# The "front" viewpoint sits centered this far beyond the near table
# edge; line-of-sight tests run from here.
VIEWPOINT_SETBACK = 0.5
# Candidate slide distances for task_planning, meters per leg.
SLIDE_PALETTE = (0.10, 0.05, -0.05, -0.10)

_DETECTION_ATTRS = ("category", "color", "material")


@dataclass(frozen=True)
class VQAPair:
    scene_id: str
    category: str
    question: str
    answer: str
    grounding: dict[str, Any]
    extra: dict[str, Any] = field(default_factory=dict)

    def validate(self) -> None:
        if self.category not in VQA_CATEGORIES:
            raise ValidationError("category", f"unknown category {self.category!r}")
        if not self.question.strip() or not self.answer.strip():
            raise ValidationError("question", "question and answer must be non-empty")
        ids = self.grounding.get("asset_ids")
        if not isinstance(ids, list) or not all(isinstance(a, str) for a in ids):
            raise ValidationError("grounding.asset_ids", "must be a list of asset ids")

    def to_dict(self) -> dict[str, Any]:
        data = {
            "scene_id": self.scene_id,
            "category": self.category,
            "question": self.question,
            "answer": self.answer,
            "grounding": self.grounding,
        }
        data.update(self.extra)
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "VQAPair":
        grounding = _require(data, "grounding", "")
        if not isinstance(grounding, dict):
            raise _fail("grounding", f"expected an object, got {type(grounding).__name__}")
        pair = cls(
            scene_id=_str(_require(data, "scene_id", ""), "scene_id"),
            category=_str(_require(data, "category", ""), "category"),
            question=_str(_require(data, "question", ""), "question"),
            answer=_str(_require(data, "answer", ""), "answer"),
            grounding=grounding,
            extra=_extra(data, ("scene_id", "category", "question", "answer", "grounding")),
        )
        pair.validate()
        return pair


def dumps_vqa(pairs: Sequence[VQAPair]) -> str:
    return json.dumps([p.to_dict() for p in pairs], indent=2) + "\n"


def loads_vqa(text: str) -> list[VQAPair]:
    raw = json.loads(text)
    if not isinstance(raw, list):
        raise _fail("pairs", f"expected a list, got {type(raw).__name__}")
    return [VQAPair.from_dict(item) for item in raw]


# ---------------------------------------------------------------------------
# geometric facts


def segment_point_distance(a: tuple[float, float], b: tuple[float, float], p: tuple[float, float]) -> float:
    ax, ay = a
    bx, by = b
    px, py = p
    dx, dy = bx - ax, by - ay
    length_sq = dx * dx + dy * dy
    if length_sq == 0.0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * dx + (py - ay) * dy) / length_sq
    t = min(1.0, max(0.0, t))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def front_viewpoint(layout: SceneLayout) -> tuple[float, float]:
    table = layout.table
    return ((table.x_min + table.x_max) / 2.0, table.y_min - VIEWPOINT_SETBACK)


def occluding_asset(layout: SceneLayout, radii: Mapping[str, float], target_index: int) -> str | None:
    """First asset whose collision circle crosses the sightline from the
    front viewpoint to the target's center; None when the view is clear."""
    viewpoint = front_viewpoint(layout)
    target = layout.placements[target_index].position_2d
    for index, placement in enumerate(layout.placements):
        if index == target_index:
            continue
        distance = segment_point_distance(viewpoint, target, placement.position_2d)
        if distance < radii[placement.asset_id]:
            return placement.asset_id
    return None


def nearest_neighbor_gap(
    layout: SceneLayout, radii: Mapping[str, float], target_index: int
) -> tuple[str, float, float] | None:
    """(neighbor_id, center_distance, gap) for the closest circle, by
    surface gap; None for singleton scenes. Ties go to placement order."""
    target = layout.placements[target_index]
    tx, ty = target.position_2d
    tr = radii[target.asset_id]
    best: tuple[str, float, float] | None = None
    for index, placement in enumerate(layout.placements):
        if index == target_index:
            continue
        px, py = placement.position_2d
        distance = math.hypot(px - tx, py - ty)
        gap = distance - tr - radii[placement.asset_id]
        if best is None or gap < best[2]:
            best = (placement.asset_id, distance, gap)
    return best


def sweep_colliders(
    layout: SceneLayout,
    radii: Mapping[str, float],
    target_index: int,
    dx: float,
    dy: float,
) -> list[str]:
    """Assets whose circles the target would strike sliding first along
    x by dx, then along y by dy. Strict overlap; grazing contact is safe."""
    target = layout.placements[target_index]
    x0, y0 = target.position_2d
    tr = radii[target.asset_id]
    mid = (x0 + dx, y0)
    end = (x0 + dx, y0 + dy)
    hits = []
    for index, placement in enumerate(layout.placements):
        if index == target_index:
            continue
        other = placement.position_2d
        reach = tr + radii[placement.asset_id]
        distance = min(
            segment_point_distance((x0, y0), mid, other),
            segment_point_distance(mid, end, other),
        )
        if distance < reach:
            hits.append(placement.asset_id)
    return hits


# ---------------------------------------------------------------------------
# answer templates


def render_answer(category: str, grounding: Mapping[str, Any]) -> str:
    """The one answer string a grounding block can produce.

    Kept separate from generation so an oracle can recompute grounding
    facts from the layout and check the stored answer is the unique
    rendering of those facts.
    """
    if category == "detection":
        return str(grounding["count"])
    if category == "language_grounding":
        return str(grounding["grasp_type"])
    if category == "functional_planning":
        point = grounding["point_position"]
        status = "clear" if grounding["blocker_id"] is None else f"blocked by {grounding['blocker_id']}"
        return (
            f"use the {grounding['function_label']} point at "
            f"({point[0]:.3f}, {point[1]:.3f}, {point[2]:.3f}); the front approach is {status}"
        )
    if category == "scene_understanding":
        return f"{grounding['gap']:.3f} m to {grounding['neighbor_id']}"
    if category == "task_planning":
        colliders = grounding["colliders"]
        if colliders:
            return f"yes: the swept path intersects {colliders[0]}"
        return "no: the swept path stays clear"
    raise ValidationError("category", f"unknown category {category!r}")


def _fmt2(value: float) -> str:
    return f"{value:.2f}"


# ---------------------------------------------------------------------------
# per-category generators


def _gen_detection(layout, records, rng, count):
    pool = []
    for kind in _DETECTION_ATTRS:
        values = sorted({getattr(records[p.asset_id].caption, kind) for p in layout.placements})
        pool.extend((kind, value) for value in values)
    pairs = []
    for pick in rng.permutation(len(pool))[:count]:
        kind, value = pool[int(pick)]
        matches = [
            p.asset_id for p in layout.placements if getattr(records[p.asset_id].caption, kind) == value
        ]
        grounding = {
            "asset_ids": matches,
            "attribute_kind": kind,
            "attribute_value": value,
            "count": len(matches),
        }
        if kind == "category":
            question = f"How many objects of category '{value}' are on the table?"
        else:
            question = f"How many {value} objects are on the table?"
        pairs.append(("detection", question, grounding))
    return pairs


def _gen_language_grounding(layout, records, rng, count):
    eligible = [
        (i, p) for i, p in enumerate(layout.placements) if records[p.asset_id].grasp_points
    ]
    pairs = []
    for pick in rng.permutation(len(eligible))[:count]:
        _, placement = eligible[int(pick)]
        record = records[placement.asset_id]
        gp = min(record.grasp_points, key=lambda g: g.id)
        x, y = placement.position_2d
        grounding = {
            "asset_ids": [placement.asset_id],
            "color": record.caption.color,
            "category": record.caption.category,
            "position_2d": [x, y],
            "grasp_point_id": gp.id,
            "grasp_type": gp.grasp_type,
        }
        question = (
            f"What grasp type suits the {record.caption.color} {record.caption.category} "
            f"at ({_fmt2(x)}, {_fmt2(y)})?"
        )
        pairs.append(("language_grounding", question, grounding))
    return pairs


def _gen_functional_planning(layout, records, rng, count, radii):
    eligible = [
        (i, p) for i, p in enumerate(layout.placements) if records[p.asset_id].functional_points
    ]
    pairs = []
    for pick in rng.permutation(len(eligible))[:count]:
        index, placement = eligible[int(pick)]
        record = records[placement.asset_id]
        fp = min(record.functional_points, key=lambda f: f.id)
        blocker = occluding_asset(layout, radii, index)
        x, y = placement.position_2d
        grounding = {
            "asset_ids": [placement.asset_id] + ([blocker] if blocker else []),
            "functional_point_id": fp.id,
            "function_label": fp.function_label,
            "point_position": list(fp.position),
            "position_2d": [x, y],
            "blocker_id": blocker,
        }
        question = (
            f"Where should a robot act on the {record.caption.category} at "
            f"({_fmt2(x)}, {_fmt2(y)}) to reach its {fp.function_label}, "
            f"and is the straight approach from the front clear?"
        )
        pairs.append(("functional_planning", question, grounding))
    return pairs


def _gen_scene_understanding(layout, records, rng, count, radii):
    if len(layout.placements) < 2:
        return []
    pairs = []
    for pick in rng.permutation(len(layout.placements))[:count]:
        index = int(pick)
        placement = layout.placements[index]
        record = records[placement.asset_id]
        neighbor_id, distance, gap = nearest_neighbor_gap(layout, radii, index)
        x, y = placement.position_2d
        grounding = {
            "asset_ids": [placement.asset_id, neighbor_id],
            "neighbor_id": neighbor_id,
            "center_distance": distance,
            "gap": gap,
        }
        question = (
            f"How much clearance does the {record.caption.category} at "
            f"({_fmt2(x)}, {_fmt2(y)}) have to its nearest neighbor?"
        )
        pairs.append(("scene_understanding", question, grounding))
    return pairs


def _gen_task_planning(layout, records, rng, count, radii):
    pairs = []
    for pick in rng.permutation(len(layout.placements))[:count]:
        index = int(pick)
        placement = layout.placements[index]
        record = records[placement.asset_id]
        dx = SLIDE_PALETTE[int(rng.integers(0, len(SLIDE_PALETTE)))]
        dy = SLIDE_PALETTE[int(rng.integers(0, len(SLIDE_PALETTE)))]
        colliders = sweep_colliders(layout, radii, index, dx, dy)
        x, y = placement.position_2d
        grounding = {
            "asset_ids": [placement.asset_id] + colliders,
            "displacement": [dx, dy],
            "colliders": colliders,
            "risk": bool(colliders),
        }
        question = (
            f"If the {record.caption.category} at ({_fmt2(x)}, {_fmt2(y)}) slides "
            f"{dx:+.2f} m along x and then {dy:+.2f} m along y, does it risk a collision?"
        )
        pairs.append(("task_planning", question, grounding))
    return pairs


def generate_vqa(
    layout: SceneLayout,
    records: Sequence[AssetRecord],
    per_category: int,
    rng_seed: int,
) -> list[VQAPair]:
    """Up to ``per_category`` pairs for each of the five categories.

    Object picks and slide displacements are drawn from a seeded
    generator, so output is deterministic. An empty scene simply yields
    no pairs. Placements referencing unknown records raise KeyError.
    """
    if per_category < 0:
        raise ValueError(f"per_category must be >= 0, got {per_category}")
    by_id = {r.asset_id: r for r in records}
    radii: dict[str, float] = {}
    for placement in layout.placements:
        if placement.asset_id not in by_id:
            raise KeyError(f"layout references unknown asset {placement.asset_id!r}")
        record = by_id[placement.asset_id]
        radii[placement.asset_id] = record.placement.collision_radius
    rng = np.random.default_rng(rng_seed)
    raw: list[tuple[str, str, dict]] = []
    raw += _gen_language_grounding(layout, by_id, rng, per_category)
    raw += _gen_functional_planning(layout, by_id, rng, per_category, radii)
    raw += _gen_scene_understanding(layout, by_id, rng, per_category, radii)
    raw += _gen_task_planning(layout, by_id, rng, per_category, radii)
    raw += _gen_detection(layout, by_id, rng, per_category)
    pairs = []
    for category, question, grounding in raw:
        pair = VQAPair(
            scene_id=layout.scene_id,
            category=category,
            question=question,
            answer=render_answer(category, grounding),
            grounding=grounding,
        )
        pair.validate()
        pairs.append(pair)
    return pairs
