"""Annotation client interface and its result types.

A client answers five questions about an asset: is it usable, what are
its bulk properties, how do we describe it, where are the task-relevant
points, and which grasp poses are plausible. Implementations must be
stateless and deterministic for fixed inputs so pipeline runs can be
reproduced and resumed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping, Protocol, Sequence, runtime_checkable

from ..errors import ValidationError
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

GATE_NOT_SINGLE_OBJECT = "not_single_object"
GATE_LOW_VISUAL_QUALITY = "low_visual_quality"
GATE_REASONS = (GATE_NOT_SINGLE_OBJECT, GATE_LOW_VISUAL_QUALITY)


@dataclass(frozen=True)
class GateResult:
    """Quality gate verdict; failures carry at least one reason."""

    passed: bool
    reasons: tuple[str, ...] = ()

    def validate(self) -> None:
        if self.passed and self.reasons:
            raise ValidationError("gate.reasons", "a passing gate must not carry reasons")
        if not self.passed and not self.reasons:
            raise ValidationError("gate.reasons", "a failing gate needs at least one reason")
        for reason in self.reasons:
            if reason not in GATE_REASONS:
                raise ValidationError("gate.reasons", f"unknown reason {reason!r}")

    def to_dict(self) -> dict[str, Any]:
        return {"passed": self.passed, "reasons": list(self.reasons)}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "GateResult":
        from ..model import _bool, _require, _str  # shared decode helpers

        reasons = data.get("reasons", [])
        return cls(
            passed=_bool(_require(data, "passed", "gate."), "gate.passed"),
            reasons=tuple(_str(r, "gate.reasons") for r in reasons),
        )


@dataclass(frozen=True)
class PropertyEstimate:
    """Physical properties plus any caveats about how they were obtained.

    ``notes`` lets estimators flag fallbacks (for example a fill-factor
    mass when the mesh volume is unusable) without holding state; the
    pipeline copies the notes into provenance.
    """

    properties: PhysicalProperties
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {"properties": self.properties.to_dict(), "notes": list(self.notes)}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "PropertyEstimate":
        from ..model import _require, _str

        notes = data.get("notes", [])
        return cls(
            properties=PhysicalProperties.from_dict(_require(data, "properties", "estimate."), "estimate.properties."),
            notes=tuple(_str(n, "estimate.notes") for n in notes),
        )


@dataclass(frozen=True)
class PointSelection:
    """Functional and grasp points chosen from a candidate set.

    ``functional_indices`` / ``grasp_indices`` map each point back to
    its candidate index, aligned with the point tuples.
    """

    functional_points: tuple[FunctionalPoint, ...]
    grasp_points: tuple[GraspPoint, ...]
    functional_indices: tuple[int, ...] = ()
    grasp_indices: tuple[int, ...] = ()

    def validate(self, candidate_count: int | None = None) -> None:
        for fp in self.functional_points:
            fp.validate()
        for gp in self.grasp_points:
            gp.validate()
        if len(self.functional_indices) != len(self.functional_points):
            raise ValidationError("selection.functional_indices", "must align with functional_points")
        if len(self.grasp_indices) != len(self.grasp_points):
            raise ValidationError("selection.grasp_indices", "must align with grasp_points")
        if candidate_count is not None:
            for idx in (*self.functional_indices, *self.grasp_indices):
                if not 0 <= idx < candidate_count:
                    raise ValidationError(
                        "selection.indices", f"candidate index {idx} out of range for {candidate_count}"
                    )

    def to_dict(self) -> dict[str, Any]:
        return {
            "functional_points": [p.to_dict() for p in self.functional_points],
            "grasp_points": [p.to_dict() for p in self.grasp_points],
            "functional_indices": list(self.functional_indices),
            "grasp_indices": list(self.grasp_indices),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "PointSelection":
        from ..model import _int, _require

        return cls(
            functional_points=tuple(
                FunctionalPoint.from_dict(d, f"selection.functional_points[{i}].")
                for i, d in enumerate(_require(data, "functional_points", "selection."))
            ),
            grasp_points=tuple(
                GraspPoint.from_dict(d, f"selection.grasp_points[{i}].")
                for i, d in enumerate(_require(data, "grasp_points", "selection."))
            ),
            functional_indices=tuple(
                _int(i, "selection.functional_indices") for i in _require(data, "functional_indices", "selection.")
            ),
            grasp_indices=tuple(
                _int(i, "selection.grasp_indices") for i in _require(data, "grasp_indices", "selection.")
            ),
        )


@dataclass(frozen=True)
class SelectionBounds:
    """How many points of each kind a selection should produce."""

    min_functional: int = 2
    max_functional: int = 4
    min_grasp: int = 2
    max_grasp: int = 3


@runtime_checkable
class AnnotationClient(Protocol):
    """The five annotation calls the pipeline makes per asset."""

    def quality_gate(self, asset_id: str, mesh: TriMesh, views: Sequence[RenderView]) -> GateResult:
        ...

    def estimate_properties(self, asset_id: str, mesh: TriMesh, views: Sequence[RenderView]) -> PropertyEstimate:
        ...

    def caption(self, asset_id: str, mesh: TriMesh, views: Sequence[RenderView]) -> SemanticCaption:
        ...

    def select_points(
        self, asset_id: str, candidates: PointCloud, views: Sequence[RenderView]
    ) -> PointSelection:
        ...

    def propose_grasps(
        self, asset_id: str, cloud: PointCloud, gripper: GripperModel, max_n: int, seed: int
    ) -> tuple[GraspPose, ...]:
        ...
