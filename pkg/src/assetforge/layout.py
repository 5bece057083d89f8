"""Tabletop scene layout sampling.

Objects are placed on an axis-aligned table rectangle by sequential
rejection sampling over their collision circles. Overlap is inclusive:
two circles may touch (``dist == r_i + r_j``), they may not overlap.
Both the sampler's accept rule and the validator compare squared
distances with the same arithmetic, so a sampled layout always
validates clean.

The only free rotation is yaw; each asset's placement annotation
already defines its upright pose on the plane.
"""

from __future__ import annotations

import json
from collections.abc import Sequence
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import PlacementInfeasibleError, ValidationError
from .model import AssetRecord, _extra, _fail, _float, _int, _require, _str

TWO_PI = 2.0 * np.pi
DEFAULT_MAX_ATTEMPTS = 1000


@dataclass(frozen=True)
class TableRect:
    """Axis-aligned table region in meters, corner at (x_min, y_min)."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        for name in ("x_min", "y_min", "x_max", "y_max"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise ValidationError(name, f"must be finite, got {value}")
        if self.x_max <= self.x_min or self.y_max <= self.y_min:
            raise ValidationError(
                "table", f"empty table rectangle ({self.x_min}, {self.y_min}, {self.x_max}, {self.y_max})"
            )

    @classmethod
    def from_size(cls, width: float, depth: float) -> "TableRect":
        return cls(0.0, 0.0, width, depth)

    def contains_circle(self, x: float, y: float, radius: float) -> bool:
        return (
            x - radius >= self.x_min
            and x + radius <= self.x_max
            and y - radius >= self.y_min
            and y + radius <= self.y_max
        )

    def inset(self, radius: float) -> tuple[float, float, float, float] | None:
        """Sampling window for a circle center, or None when it cannot fit."""
        lo_x, hi_x = self.x_min + radius, self.x_max - radius
        lo_y, hi_y = self.y_min + radius, self.y_max - radius
        if lo_x > hi_x or lo_y > hi_y:
            return None
        return lo_x, hi_x, lo_y, hi_y

    def to_dict(self) -> dict:
        return {"x_min": self.x_min, "y_min": self.y_min, "x_max": self.x_max, "y_max": self.y_max}

    @classmethod
    def from_dict(cls, data: dict, prefix: str = "table.") -> "TableRect":
        return cls(
            **{
                name: _float(_require(data, name, prefix), prefix + name)
                for name in ("x_min", "y_min", "x_max", "y_max")
            }
        )


@dataclass(frozen=True)
class ScenePlacement:
    """One object dropped on the table: center of its collision circle plus yaw."""

    asset_id: str
    position_2d: tuple[float, float]
    yaw: float
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.asset_id:
            raise ValidationError("asset_id", "must be non-empty")
        if len(self.position_2d) != 2 or not all(np.isfinite(v) for v in self.position_2d):
            raise ValidationError("position_2d", f"must be two finite floats, got {self.position_2d}")
        if not np.isfinite(self.yaw):
            raise ValidationError("yaw", f"must be finite, got {self.yaw}")

    def to_dict(self) -> dict:
        data = {
            "asset_id": self.asset_id,
            "position_2d": list(self.position_2d),
            "yaw": self.yaw,
        }
        data.update(self.extra)
        return data

    @classmethod
    def from_dict(cls, data: dict, prefix: str = "placement.") -> "ScenePlacement":
        position = _require(data, "position_2d", prefix)
        if not isinstance(position, (list, tuple)) or len(position) != 2:
            raise _fail(prefix + "position_2d", f"expected a pair, got {position!r}")
        return cls(
            asset_id=_str(_require(data, "asset_id", prefix), prefix + "asset_id"),
            position_2d=(
                _float(position[0], prefix + "position_2d"),
                _float(position[1], prefix + "position_2d"),
            ),
            yaw=_float(_require(data, "yaw", prefix), prefix + "yaw"),
            extra=_extra(data, ("asset_id", "position_2d", "yaw")),
        )


@dataclass(frozen=True)
class SceneLayout:
    scene_id: str
    table: TableRect
    placements: tuple[ScenePlacement, ...]
    rng_seed: int = 0
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.scene_id:
            raise ValidationError("scene_id", "must be non-empty")
        object.__setattr__(self, "placements", tuple(self.placements))

    def to_dict(self) -> dict:
        data = {
            "scene_id": self.scene_id,
            "table": self.table.to_dict(),
            "placements": [p.to_dict() for p in self.placements],
            "rng_seed": self.rng_seed,
        }
        data.update(self.extra)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "SceneLayout":
        table = _require(data, "table", "")
        if not isinstance(table, dict):
            raise _fail("table", f"expected an object, got {type(table).__name__}")
        placements = _require(data, "placements", "")
        if not isinstance(placements, list):
            raise _fail("placements", f"expected a list, got {type(placements).__name__}")
        return cls(
            scene_id=_str(_require(data, "scene_id", ""), "scene_id"),
            table=TableRect.from_dict(table),
            placements=tuple(
                ScenePlacement.from_dict(p, f"placements[{i}].") for i, p in enumerate(placements)
            ),
            rng_seed=_int(data.get("rng_seed", 0), "rng_seed"),
            extra=_extra(data, ("scene_id", "table", "placements", "rng_seed")),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def loads(cls, text: str) -> "SceneLayout":
        return cls.from_dict(json.loads(text))


def _radius_map(assets: Sequence[AssetRecord]) -> dict[str, float]:
    radii = {}
    for record in assets:
        if record.placement is None:
            raise ValidationError("placement", f"asset {record.asset_id} has no placement annotation")
        radii[record.asset_id] = record.placement.collision_radius
    return radii


def sample_layout(
    assets: Sequence[AssetRecord],
    table: TableRect,
    rng_seed: int,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
    scene_id: str | None = None,
) -> SceneLayout:
    """Place objects in input order by rejection sampling.

    Each object's center is drawn uniformly from the table inset by its
    collision radius, with a uniform yaw; a draw is accepted when the
    circle clears every already-placed circle (tangency allowed). An
    object that cannot fit, or exhausts ``max_attempts`` draws, raises
    ``PlacementInfeasibleError``. Deterministic for a given seed and
    asset order.
    """
    if max_attempts < 1:
        raise ValueError(f"max_attempts must be >= 1, got {max_attempts}")
    radii = _radius_map(assets)
    rng = np.random.default_rng(rng_seed)
    placed: list[tuple[float, float, float]] = []  # x, y, radius
    placements: list[ScenePlacement] = []
    for record in assets:
        radius = radii[record.asset_id]
        window = table.inset(radius)
        if window is None:
            raise PlacementInfeasibleError(record.asset_id, 0)
        lo_x, hi_x, lo_y, hi_y = window
        for attempt in range(max_attempts):
            x = float(rng.uniform(lo_x, hi_x))
            y = float(rng.uniform(lo_y, hi_y))
            yaw = float(rng.uniform(0.0, TWO_PI))
            ok = True
            for px, py, pr in placed:
                dx, dy = x - px, y - py
                min_dist = radius + pr
                if dx * dx + dy * dy < min_dist * min_dist:
                    ok = False
                    break
            if ok:
                placed.append((x, y, radius))
                placements.append(ScenePlacement(record.asset_id, (x, y), yaw))
                break
        else:
            raise PlacementInfeasibleError(record.asset_id, max_attempts)
    return SceneLayout(
        scene_id=scene_id if scene_id is not None else f"scene-{rng_seed}",
        table=table,
        placements=tuple(placements),
        rng_seed=rng_seed,
    )


@dataclass(frozen=True)
class LayoutViolation:
    kind: str  # "overlap" or "out_of_bounds"
    indices: tuple[int, ...]
    detail: str

    def __str__(self) -> str:
        return f"{self.kind}{self.indices}: {self.detail}"


def validate_layout(layout: SceneLayout, assets: Sequence[AssetRecord]) -> list[LayoutViolation]:
    """Every overlap pair and out-of-bounds placement, empty when clean.

    Uses the same inclusive-tangency arithmetic as the sampler: a pair
    violates only when the squared center distance is strictly below
    the squared radius sum. Unknown asset ids raise KeyError.
    """
    radii = _radius_map(assets)
    violations: list[LayoutViolation] = []
    circles = []
    for index, placement in enumerate(layout.placements):
        if placement.asset_id not in radii:
            raise KeyError(f"layout references unknown asset {placement.asset_id!r}")
        x, y = placement.position_2d
        radius = radii[placement.asset_id]
        circles.append((x, y, radius))
        if not layout.table.contains_circle(x, y, radius):
            violations.append(
                LayoutViolation(
                    "out_of_bounds",
                    (index,),
                    f"{placement.asset_id} circle r={radius} at ({x}, {y}) leaves the table",
                )
            )
    for i in range(len(circles)):
        xi, yi, ri = circles[i]
        for j in range(i + 1, len(circles)):
            xj, yj, rj = circles[j]
            dx, dy = xi - xj, yi - yj
            min_dist = ri + rj
            if dx * dx + dy * dy < min_dist * min_dist:
                violations.append(
                    LayoutViolation(
                        "overlap",
                        (i, j),
                        f"{layout.placements[i].asset_id} and {layout.placements[j].asset_id} "
                        f"closer than {min_dist}",
                    )
                )
    return violations


def with_table(layout: SceneLayout, table: TableRect) -> SceneLayout:
    """Same placements on a different table; useful for containment checks."""
    return replace(layout, table=table)
