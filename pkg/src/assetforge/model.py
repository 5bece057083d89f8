"""Domain types for simulation-ready assets.

Conventions used throughout the package:

* units are meters and kilograms,
* quaternions are stored ``(w, x, y, z)`` and unit-norm,
* the asset frame is z-up with the placement origin at the projected
  centroid of the mesh,
* record types are immutable values with plain-tuple payloads so that
  equality and serialization are exact.

Every record type round-trips through ``to_dict`` / ``from_dict``.
Unknown keys encountered while decoding are kept in an ``extra``
mapping and re-emitted on encode, so manifests written by newer code
survive a read/write cycle here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .errors import ManifestParseError, ValidationError

Vec3 = tuple[float, float, float]
Quat = tuple[float, float, float, float]

GRASP_TYPES = ("parallel-jaw", "pinch", "power", "three-finger", "enveloping")
FAILURE_REASONS = ("penetration", "no_contact", "not_force_closure", "slide_failure", "none")
REVIEW_DIMENSIONS = (
    "category_classification",
    "language_descriptions",
    "functional_point_labels",
    "physical_property_estimation",
    "grasp_point_selection",
)
REVIEW_RATINGS = ("correct", "incorrect")

# Verification thresholds. A grasp is stable when the held object moves
# less than DISPLACEMENT_THRESHOLD and stays put for MIN_STABLE_FRAMES
# consecutive checks.
DISPLACEMENT_THRESHOLD = 0.01
MIN_STABLE_FRAMES = 3

QUAT_NORM_TOL = 1e-6
MAX_FRICTION = 2.0

# Functional points may sit slightly outside the estimated bounding box
# (annotation noise); 5% inflation is the accepted slack.
OBB_INFLATION = 1.05


# ---------------------------------------------------------------------------
# decode helpers


def _fail(field_name: str, message: str) -> ManifestParseError:
    return ManifestParseError(f"field {field_name}: {message}")


def _require(data: Mapping[str, Any], key: str, prefix: str) -> Any:
    if key not in data:
        raise _fail(f"{prefix}{key}", "missing")
    return data[key]


def _float(value: Any, field_name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _fail(field_name, f"expected a number, got {type(value).__name__}")
    return float(value)


def _int(value: Any, field_name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise _fail(field_name, f"expected an integer, got {type(value).__name__}")
    return value


def _str(value: Any, field_name: str) -> str:
    if not isinstance(value, str):
        raise _fail(field_name, f"expected a string, got {type(value).__name__}")
    return value


def _bool(value: Any, field_name: str) -> bool:
    if not isinstance(value, bool):
        raise _fail(field_name, f"expected a boolean, got {type(value).__name__}")
    return value


def _tuple_of_floats(value: Any, n: int, field_name: str) -> tuple[float, ...]:
    if not isinstance(value, Sequence) or isinstance(value, (str, bytes)):
        raise _fail(field_name, "expected a sequence of numbers")
    if len(value) != n:
        raise _fail(field_name, f"expected {n} components, got {len(value)}")
    return tuple(_float(v, field_name) for v in value)


def _vec3(value: Any, field_name: str) -> Vec3:
    return _tuple_of_floats(value, 3, field_name)  # type: ignore[return-value]


def _quat(value: Any, field_name: str) -> Quat:
    return _tuple_of_floats(value, 4, field_name)  # type: ignore[return-value]


def _extra(data: Mapping[str, Any], known: Iterable[str]) -> dict[str, Any]:
    known = set(known)
    return {k: v for k, v in data.items() if k not in known}


def _check_finite_vec(vec: Sequence[float], field_name: str) -> None:
    if not all(math.isfinite(v) for v in vec):
        raise ValidationError(field_name, "components must be finite")


def _check_unit_quat(quat: Quat, field_name: str) -> None:
    _check_finite_vec(quat, field_name)
    norm = math.sqrt(sum(c * c for c in quat))
    if abs(norm - 1.0) > QUAT_NORM_TOL:
        raise ValidationError(field_name, f"quaternion norm {norm!r} is not 1 within {QUAT_NORM_TOL}")


# ---------------------------------------------------------------------------
# geometric substrate


@dataclass(frozen=True)
class TriMesh:
    """Triangle mesh with float64 vertices and int64 face indices.

    Arrays are made read-only on construction; meshes are safe to share
    across threads. Invariants are enforced eagerly because the rest of
    the geometry code relies on them.
    """

    vertices: np.ndarray
    faces: np.ndarray

    def __post_init__(self):
        verts = np.ascontiguousarray(np.asarray(self.vertices, dtype=np.float64))
        faces = np.ascontiguousarray(np.asarray(self.faces, dtype=np.int64))
        if verts.ndim != 2 or verts.shape[1] != 3:
            raise ValidationError("vertices", f"expected (n, 3) array, got {verts.shape}")
        if faces.ndim != 2 or faces.shape[1] != 3:
            raise ValidationError("faces", f"expected (m, 3) array, got {faces.shape}")
        if verts.shape[0] == 0 or faces.shape[0] == 0:
            raise ValidationError("faces", "mesh must have at least one vertex and one face")
        if not np.isfinite(verts).all():
            raise ValidationError("vertices", "coordinates must be finite")
        if faces.min(initial=0) < 0 or (faces.shape[0] and faces.max() >= verts.shape[0]):
            raise ValidationError("faces", "face index out of range")
        same = (faces[:, 0] == faces[:, 1]) | (faces[:, 1] == faces[:, 2]) | (faces[:, 0] == faces[:, 2])
        if same.any():
            raise ValidationError("faces", f"face {int(np.flatnonzero(same)[0])} repeats a vertex index")
        verts.setflags(write=False)
        faces.setflags(write=False)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "faces", faces)

    @property
    def n_vertices(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def n_faces(self) -> int:
        return int(self.faces.shape[0])


@dataclass(frozen=True)
class PointCloud:
    """Points with optional per-point unit normals."""

    points: np.ndarray
    normals: np.ndarray | None = None

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=np.float64))
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValidationError("points", f"expected (n, 3) array, got {pts.shape}")
        if not np.isfinite(pts).all():
            raise ValidationError("points", "coordinates must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.normals is not None:
            nrm = np.ascontiguousarray(np.asarray(self.normals, dtype=np.float64))
            if nrm.shape != pts.shape:
                raise ValidationError("normals", f"expected shape {pts.shape}, got {nrm.shape}")
            lengths = np.linalg.norm(nrm, axis=1)
            if not np.isfinite(lengths).all() or np.abs(lengths - 1.0).max(initial=0.0) > QUAT_NORM_TOL:
                raise ValidationError("normals", f"normals must be unit within {QUAT_NORM_TOL}")
            nrm.setflags(write=False)
            object.__setattr__(self, "normals", nrm)

    def __len__(self) -> int:
        return int(self.points.shape[0])


@dataclass(frozen=True)
class OrientedBoundingBox:
    """Box with orthonormal axes; half extents sorted longest-first."""

    center: np.ndarray
    rotation: np.ndarray
    half_extents: np.ndarray

    def __post_init__(self):
        center = np.ascontiguousarray(np.asarray(self.center, dtype=np.float64))
        rot = np.ascontiguousarray(np.asarray(self.rotation, dtype=np.float64))
        half = np.ascontiguousarray(np.asarray(self.half_extents, dtype=np.float64))
        if center.shape != (3,):
            raise ValidationError("center", f"expected (3,) array, got {center.shape}")
        if rot.shape != (3, 3):
            raise ValidationError("rotation", f"expected (3, 3) array, got {rot.shape}")
        if half.shape != (3,):
            raise ValidationError("half_extents", f"expected (3,) array, got {half.shape}")
        if not (np.isfinite(center).all() and np.isfinite(rot).all() and np.isfinite(half).all()):
            raise ValidationError("half_extents", "box parameters must be finite")
        if np.abs(rot.T @ rot - np.eye(3)).max() > QUAT_NORM_TOL:
            raise ValidationError("rotation", f"columns must be orthonormal within {QUAT_NORM_TOL}")
        if (half < 0).any():
            raise ValidationError("half_extents", "half extents must be non-negative")
        if not (half[0] >= half[1] >= half[2]):
            raise ValidationError("half_extents", "half extents must be sorted descending")
        for arr, name in ((center, "center"), (rot, "rotation"), (half, "half_extents")):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def contains(self, points: np.ndarray, tol: float = 1e-9, inflate: float = 1.0) -> np.ndarray:
        """Boolean mask of points inside the (optionally inflated) box."""
        local = (np.atleast_2d(points) - self.center) @ self.rotation
        return (np.abs(local) <= self.half_extents * inflate + tol).all(axis=1)

    @property
    def dims(self) -> Vec3:
        return tuple(float(2.0 * h) for h in self.half_extents)  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# annotation records


@dataclass(frozen=True)
class PhysicalProperties:
    """Estimated bulk properties of one asset."""

    obb_dims: Vec3
    mass: float
    friction: float
    extra: dict[str, Any] = field(default_factory=dict)

    def validate(self) -> None:
        _check_finite_vec(self.obb_dims, "obb_dims")
        if any(d <= 0 for d in self.obb_dims):
            raise ValidationError("obb_dims", "dimensions must be positive")
        if not math.isfinite(self.mass) or self.mass <= 0:
            raise ValidationError("mass", f"mass must be positive and finite, got {self.mass!r}")
        if not math.isfinite(self.friction) or not 0.0 <= self.friction <= MAX_FRICTION:
            raise ValidationError("friction", f"friction must lie in [0, {MAX_FRICTION}], got {self.friction!r}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "obb_dims": list(self.obb_dims),
            "mass": self.mass,
            "friction": self.friction,
            **self.extra,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], prefix: str = "physical.") -> "PhysicalProperties":
        return cls(
            obb_dims=_vec3(_require(data, "obb_dims", prefix), prefix + "obb_dims"),
            mass=_float(_require(data, "mass", prefix), prefix + "mass"),
            friction=_float(_require(data, "friction", prefix), prefix + "friction"),
            extra=_extra(data, ("obb_dims", "mass", "friction")),
        )


@dataclass(frozen=True)
class SemanticCaption:
    """Six short descriptive strings; all required and non-empty."""

    category: str
    color: str
    material: str
    size: str
    shape: str
    function: str
    extra: dict[str, Any] = field(default_factory=dict)

    _FIELDS = ("category", "color", "material", "size", "shape", "function")

    def validate(self) -> None:
        for name in self._FIELDS:
            value = getattr(self, name)
            if not isinstance(value, str) or not value.strip():
                raise ValidationError(f"caption.{name}", "must be a non-empty string")

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {name: getattr(self, name) for name in self._FIELDS}
        out.update(self.extra)
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], prefix: str = "caption.") -> "SemanticCaption":
        kwargs = {name: _str(_require(data, name, prefix), prefix + name) for name in cls._FIELDS}
        return cls(**kwargs, extra=_extra(data, cls._FIELDS))


@dataclass(frozen=True)
class FunctionalPoint:
    """A task-relevant location on the asset surface."""

    id: int
    position: Vec3
    function_label: str
    confidence: float
    rationale: str
    extra: dict[str, Any] = field(default_factory=dict)

    def validate(self, obb: OrientedBoundingBox | None = None) -> None:
        if self.id < 0:
            raise ValidationError("functional_point.id", "id must be non-negative")
        _check_finite_vec(self.position, "functional_point.position")
        if not self.function_label.strip():
            raise ValidationError("functional_point.function_label", "must be non-empty")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValidationError("functional_point.confidence", f"must lie in [0, 1], got {self.confidence!r}")
        if obb is not None and not obb.contains(np.array(self.position), inflate=OBB_INFLATION)[0]:
            raise ValidationError(
                "functional_point.position",
                f"point {self.id} lies outside the asset bounding box (inflated {OBB_INFLATION}x)",
            )

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "position": list(self.position),
            "function_label": self.function_label,
            "confidence": self.confidence,
            "rationale": self.rationale,
            **self.extra,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], prefix: str = "functional_point.") -> "FunctionalPoint":
        return cls(
            id=_int(_require(data, "id", prefix), prefix + "id"),
            position=_vec3(_require(data, "position", prefix), prefix + "position"),
            function_label=_str(_require(data, "function_label", prefix), prefix + "function_label"),
            confidence=_float(_require(data, "confidence", prefix), prefix + "confidence"),
            rationale=_str(_require(data, "rationale", prefix), prefix + "rationale"),
            extra=_extra(data, ("id", "position", "function_label", "confidence", "rationale")),
        )


@dataclass(frozen=True)
class GraspPoint:
    """A suggested contact region with the grasp family to use there."""

    id: int
    position: Vec3
    grasp_type: str
    use_scenario: str
    extra: dict[str, Any] = field(default_factory=dict)

    def validate(self) -> None:
        if self.id < 0:
            raise ValidationError("grasp_point.id", "id must be non-negative")
        _check_finite_vec(self.position, "grasp_point.position")
        if self.grasp_type not in GRASP_TYPES:
            raise ValidationError("grasp_point.grasp_type", f"unknown grasp type {self.grasp_type!r}")
        if not self.use_scenario.strip():
            raise ValidationError("grasp_point.use_scenario", "must be non-empty")

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "position": list(self.position),
            "grasp_type": self.grasp_type,
            "use_scenario": self.use_scenario,
            **self.extra,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], prefix: str = "grasp_point.") -> "GraspPoint":
        return cls(
            id=_int(_require(data, "id", prefix), prefix + "id"),
            position=_vec3(_require(data, "position", prefix), prefix + "position"),
            grasp_type=_str(_require(data, "grasp_type", prefix), prefix + "grasp_type"),
            use_scenario=_str(_require(data, "use_scenario", prefix), prefix + "use_scenario"),
            extra=_extra(data, ("id", "position", "grasp_type", "use_scenario")),
        )


@dataclass(frozen=True)
class VerificationOutcome:
    """Result of the quasi-static grasp check."""

    passed: bool
    failure_reason: str
    stable_frames: int
    max_displacement: float
    extra: dict[str, Any] = field(default_factory=dict)

    def validate(self, displacement_threshold: float = DISPLACEMENT_THRESHOLD) -> None:
        if self.failure_reason not in FAILURE_REASONS:
            raise ValidationError("verification.failure_reason", f"unknown reason {self.failure_reason!r}")
        if self.passed != (self.failure_reason == "none"):
            raise ValidationError(
                "verification.failure_reason",
                "passed outcomes must carry reason 'none' and failed ones must not",
            )
        if self.stable_frames < 0:
            raise ValidationError("verification.stable_frames", "must be non-negative")
        if not math.isfinite(self.max_displacement) or self.max_displacement < 0:
            raise ValidationError("verification.max_displacement", "must be finite and non-negative")
        if self.passed:
            if self.stable_frames < MIN_STABLE_FRAMES:
                raise ValidationError(
                    "verification.stable_frames",
                    f"passing grasps need at least {MIN_STABLE_FRAMES} stable frames",
                )
            if self.max_displacement >= displacement_threshold:
                raise ValidationError(
                    "verification.max_displacement",
                    f"passing grasps must stay under {displacement_threshold} m",
                )

    def to_dict(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "failure_reason": self.failure_reason,
            "stable_frames": self.stable_frames,
            "max_displacement": self.max_displacement,
            **self.extra,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], prefix: str = "verification.") -> "VerificationOutcome":
        return cls(
            passed=_bool(_require(data, "passed", prefix), prefix + "passed"),
            failure_reason=_str(_require(data, "failure_reason", prefix), prefix + "failure_reason"),
            stable_frames=_int(_require(data, "stable_frames", prefix), prefix + "stable_frames"),
            max_displacement=_float(_require(data, "max_displacement", prefix), prefix + "max_displacement"),
            extra=_extra(data, ("passed", "failure_reason", "stable_frames", "max_displacement")),
        )


@dataclass(frozen=True)
class GraspPose:
    """A 7-DoF parallel-jaw grasp: position, orientation, confidence.

    The gripper frame has x along the jaw (closing) axis and z along the
    approach direction pointing from the palm toward the fingertips.
    """

    position: Vec3
    orientation: Quat
    confidence: float
    associated_functional_point: int | None = None
    associated_grasp_point: int | None = None
    verification: VerificationOutcome | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    def validate(self) -> None:
        _check_finite_vec(self.position, "grasp.position")
        _check_unit_quat(self.orientation, "grasp.orientation")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValidationError("grasp.confidence", f"must lie in [0, 1], got {self.confidence!r}")
        for name in ("associated_functional_point", "associated_grasp_point"):
            ref = getattr(self, name)
            if ref is not None and ref < 0:
                raise ValidationError(f"grasp.{name}", "id reference must be non-negative")
        if self.verification is not None:
            self.verification.validate()

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "position": list(self.position),
            "orientation": list(self.orientation),
            "confidence": self.confidence,
            "associated_functional_point": self.associated_functional_point,
            "associated_grasp_point": self.associated_grasp_point,
            "verification": None if self.verification is None else self.verification.to_dict(),
        }
        out.update(self.extra)
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], prefix: str = "grasp.") -> "GraspPose":
        fp = data.get("associated_functional_point")
        gp = data.get("associated_grasp_point")
        verification = data.get("verification")
        return cls(
            position=_vec3(_require(data, "position", prefix), prefix + "position"),
            orientation=_quat(_require(data, "orientation", prefix), prefix + "orientation"),
            confidence=_float(_require(data, "confidence", prefix), prefix + "confidence"),
            associated_functional_point=None if fp is None else _int(fp, prefix + "associated_functional_point"),
            associated_grasp_point=None if gp is None else _int(gp, prefix + "associated_grasp_point"),
            verification=None
            if verification is None
            else VerificationOutcome.from_dict(verification, prefix + "verification."),
            extra=_extra(
                data,
                (
                    "position",
                    "orientation",
                    "confidence",
                    "associated_functional_point",
                    "associated_grasp_point",
                    "verification",
                ),
            ),
        )


@dataclass(frozen=True)
class GripperModel:
    """Parallel-jaw gripper dimensions (meters) and squeeze force (N)."""

    max_opening: float = 0.08
    finger_length: float = 0.045
    finger_thickness: float = 0.01
    palm_depth: float = 0.02
    squeeze_force: float = 20.0
    extra: dict[str, Any] = field(default_factory=dict)

    def validate(self) -> None:
        for name in ("max_opening", "finger_length", "finger_thickness", "palm_depth", "squeeze_force"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise ValidationError(f"gripper.{name}", f"must be positive and finite, got {value!r}")
        if self.max_opening <= 2.0 * self.finger_thickness:
            raise ValidationError(
                "gripper.max_opening",
                "opening must exceed twice the finger thickness or the jaws cannot close",
            )

    def to_dict(self) -> dict[str, Any]:
        return {
            "max_opening": self.max_opening,
            "finger_length": self.finger_length,
            "finger_thickness": self.finger_thickness,
            "palm_depth": self.palm_depth,
            "squeeze_force": self.squeeze_force,
            **self.extra,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], prefix: str = "gripper.") -> "GripperModel":
        names = ("max_opening", "finger_length", "finger_thickness", "palm_depth", "squeeze_force")
        kwargs = {name: _float(_require(data, name, prefix), prefix + name) for name in names}
        return cls(**kwargs, extra=_extra(data, names))


DEFAULT_GRIPPER = GripperModel()


@dataclass(frozen=True)
class PlacementAnnotation:
    """How the asset rests on a horizontal support.

    ``position`` is added to asset-frame coordinates so the projected
    centroid lands on the support point and the lowest vertex touches
    the surface. ``collision_radius`` bounds the horizontal footprint
    about that origin.
    """

    position: Vec3
    orientation: Quat
    collision_radius: float
    extra: dict[str, Any] = field(default_factory=dict)

    def validate(self) -> None:
        _check_finite_vec(self.position, "placement.position")
        _check_unit_quat(self.orientation, "placement.orientation")
        if not math.isfinite(self.collision_radius) or self.collision_radius <= 0:
            raise ValidationError(
                "placement.collision_radius",
                f"must be positive and finite, got {self.collision_radius!r}",
            )

    def to_dict(self) -> dict[str, Any]:
        return {
            "position": list(self.position),
            "orientation": list(self.orientation),
            "collision_radius": self.collision_radius,
            **self.extra,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], prefix: str = "placement.") -> "PlacementAnnotation":
        return cls(
            position=_vec3(_require(data, "position", prefix), prefix + "position"),
            orientation=_quat(_require(data, "orientation", prefix), prefix + "orientation"),
            collision_radius=_float(_require(data, "collision_radius", prefix), prefix + "collision_radius"),
            extra=_extra(data, ("position", "orientation", "collision_radius")),
        )


@dataclass(frozen=True)
class StageEvent:
    """One pipeline stage outcome recorded in provenance.

    ``timestamp`` is optional: manifest provenance omits it so that
    identical inputs produce byte-identical manifests, while the store's
    stage log keeps wall-clock times for operators.
    """

    stage: str
    status: str
    params_hash: str
    notes: tuple[str, ...] = ()
    timestamp: str | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    STATUSES = ("ok", "filtered", "error")

    def validate(self) -> None:
        if not self.stage.strip():
            raise ValidationError("provenance.stage", "must be non-empty")
        if self.status not in self.STATUSES:
            raise ValidationError("provenance.status", f"unknown status {self.status!r}")

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "stage": self.stage,
            "status": self.status,
            "params_hash": self.params_hash,
            "notes": list(self.notes),
        }
        if self.timestamp is not None:
            out["timestamp"] = self.timestamp
        out.update(self.extra)
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], prefix: str = "provenance.") -> "StageEvent":
        notes = data.get("notes", [])
        if not isinstance(notes, Sequence) or isinstance(notes, (str, bytes)):
            raise _fail(prefix + "notes", "expected a list of strings")
        ts = data.get("timestamp")
        return cls(
            stage=_str(_require(data, "stage", prefix), prefix + "stage"),
            status=_str(_require(data, "status", prefix), prefix + "status"),
            params_hash=_str(_require(data, "params_hash", prefix), prefix + "params_hash"),
            notes=tuple(_str(n, prefix + "notes") for n in notes),
            timestamp=None if ts is None else _str(ts, prefix + "timestamp"),
            extra=_extra(data, ("stage", "status", "params_hash", "notes", "timestamp")),
        )


@dataclass(frozen=True)
class AssetRecord:
    """Everything the pipeline knows about one processed asset."""

    asset_id: str
    mesh_ref: str
    physical: PhysicalProperties
    caption: SemanticCaption
    functional_points: tuple[FunctionalPoint, ...]
    grasp_points: tuple[GraspPoint, ...]
    verified_grasps: tuple[GraspPose, ...]
    placement: PlacementAnnotation
    provenance: tuple[StageEvent, ...] = ()
    extra: dict[str, Any] = field(default_factory=dict)

    def validate(self, obb: OrientedBoundingBox | None = None) -> None:
        if not self.asset_id.strip():
            raise ValidationError("asset_id", "must be non-empty")
        if not self.mesh_ref.strip():
            raise ValidationError("mesh_ref", "must be non-empty")
        self.physical.validate()
        self.caption.validate()
        for fp in self.functional_points:
            fp.validate(obb)
        for gp in self.grasp_points:
            gp.validate()
        for kind, points in (("functional_points", self.functional_points), ("grasp_points", self.grasp_points)):
            ids = [p.id for p in points]
            if len(set(ids)) != len(ids):
                raise ValidationError(kind, "point ids must be unique")
        fp_ids = {p.id for p in self.functional_points}
        gp_ids = {p.id for p in self.grasp_points}
        for i, grasp in enumerate(self.verified_grasps):
            grasp.validate()
            if grasp.verification is None or not grasp.verification.passed:
                raise ValidationError(
                    f"verified_grasps[{i}].verification",
                    "verified grasps must carry a passing verification outcome",
                )
            if grasp.associated_functional_point is not None and grasp.associated_functional_point not in fp_ids:
                raise ValidationError(
                    f"verified_grasps[{i}].associated_functional_point",
                    f"unknown functional point id {grasp.associated_functional_point}",
                )
            if grasp.associated_grasp_point is not None and grasp.associated_grasp_point not in gp_ids:
                raise ValidationError(
                    f"verified_grasps[{i}].associated_grasp_point",
                    f"unknown grasp point id {grasp.associated_grasp_point}",
                )
        self.placement.validate()
        for event in self.provenance:
            event.validate()

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "asset_id": self.asset_id,
            "mesh_ref": self.mesh_ref,
            "physical": self.physical.to_dict(),
            "caption": self.caption.to_dict(),
            "functional_points": [p.to_dict() for p in self.functional_points],
            "grasp_points": [p.to_dict() for p in self.grasp_points],
            "verified_grasps": [g.to_dict() for g in self.verified_grasps],
            "placement": self.placement.to_dict(),
            "provenance": [e.to_dict() for e in self.provenance],
        }
        out.update(self.extra)
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "AssetRecord":
        def _list(key: str) -> list[Any]:
            value = _require(data, key, "")
            if not isinstance(value, Sequence) or isinstance(value, (str, bytes)):
                raise _fail(key, "expected a list")
            return list(value)

        return cls(
            asset_id=_str(_require(data, "asset_id", ""), "asset_id"),
            mesh_ref=_str(_require(data, "mesh_ref", ""), "mesh_ref"),
            physical=PhysicalProperties.from_dict(_require(data, "physical", ""), "physical."),
            caption=SemanticCaption.from_dict(_require(data, "caption", ""), "caption."),
            functional_points=tuple(
                FunctionalPoint.from_dict(d, f"functional_points[{i}].") for i, d in enumerate(_list("functional_points"))
            ),
            grasp_points=tuple(
                GraspPoint.from_dict(d, f"grasp_points[{i}].") for i, d in enumerate(_list("grasp_points"))
            ),
            verified_grasps=tuple(
                GraspPose.from_dict(d, f"verified_grasps[{i}].") for i, d in enumerate(_list("verified_grasps"))
            ),
            placement=PlacementAnnotation.from_dict(_require(data, "placement", ""), "placement."),
            provenance=tuple(
                StageEvent.from_dict(d, f"provenance[{i}].") for i, d in enumerate(data.get("provenance", []))
            ),
            extra=_extra(
                data,
                (
                    "asset_id",
                    "mesh_ref",
                    "physical",
                    "caption",
                    "functional_points",
                    "grasp_points",
                    "verified_grasps",
                    "placement",
                    "provenance",
                ),
            ),
        )


# ---------------------------------------------------------------------------
# aggregate types


@dataclass(frozen=True)
class PipelineStats:
    """Per-run counters plus derived rates.

    Rates are plain numerator/denominator quotients and come back as
    ``None`` (never 0) when the denominator is zero.
    """

    ingested: int = 0
    gate_passed: int = 0
    annotated: int = 0
    errored: int = 0
    proposals_raw: int = 0
    candidates: int = 0
    verified: int = 0

    def validate(self) -> None:
        for name in ("ingested", "gate_passed", "annotated", "errored", "proposals_raw", "candidates", "verified"):
            if getattr(self, name) < 0:
                raise ValidationError(f"stats.{name}", "counts must be non-negative")
        if self.gate_passed > self.ingested:
            raise ValidationError("stats.gate_passed", "cannot exceed ingested")
        if self.annotated > self.gate_passed:
            raise ValidationError("stats.annotated", "cannot exceed gate_passed")
        if self.verified > self.candidates:
            raise ValidationError("stats.verified", "cannot exceed candidates")

    @staticmethod
    def _rate(num: float, den: float) -> float | None:
        return None if den == 0 else num / den

    def gate_pass_rate(self) -> float | None:
        return self._rate(self.gate_passed, self.ingested)

    def verification_success_rate(self) -> float | None:
        return self._rate(self.verified, self.candidates)

    def avg_proposals_per_object(self) -> float | None:
        return self._rate(self.proposals_raw, self.annotated)

    def avg_candidates_per_object(self) -> float | None:
        return self._rate(self.candidates, self.annotated)

    def avg_verified_per_object(self) -> float | None:
        return self._rate(self.verified, self.annotated)

    def to_dict(self) -> dict[str, Any]:
        return {
            "counts": {
                "ingested": self.ingested,
                "gate_passed": self.gate_passed,
                "annotated": self.annotated,
                "errored": self.errored,
                "proposals_raw": self.proposals_raw,
                "candidates": self.candidates,
                "verified": self.verified,
            },
            "rates": {
                "gate_pass_rate": self.gate_pass_rate(),
                "verification_success_rate": self.verification_success_rate(),
                "avg_proposals_per_object": self.avg_proposals_per_object(),
                "avg_candidates_per_object": self.avg_candidates_per_object(),
                "avg_verified_per_object": self.avg_verified_per_object(),
            },
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "PipelineStats":
        counts = _require(data, "counts", "stats.")
        names = ("ingested", "gate_passed", "annotated", "errored", "proposals_raw", "candidates", "verified")
        return cls(**{name: _int(_require(counts, name, "stats.counts."), f"stats.counts.{name}") for name in names})


@dataclass(frozen=True)
class ReviewVerdict:
    """One reviewer's judgment of one asset; append-only once stored."""

    asset_id: str
    reviewer_id: str
    ratings: dict[str, str]
    overall: str
    note: str | None = None
    timestamp: str | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    def validate(self) -> None:
        if not self.asset_id.strip():
            raise ValidationError("verdict.asset_id", "must be non-empty")
        if not self.reviewer_id.strip():
            raise ValidationError("verdict.reviewer_id", "must be non-empty")
        missing = [d for d in REVIEW_DIMENSIONS if d not in self.ratings]
        if missing:
            raise ValidationError("verdict.ratings", f"missing dimensions: {', '.join(missing)}")
        unknown = [d for d in self.ratings if d not in REVIEW_DIMENSIONS]
        if unknown:
            raise ValidationError("verdict.ratings", f"unknown dimensions: {', '.join(unknown)}")
        for dim, rating in self.ratings.items():
            if rating not in REVIEW_RATINGS:
                raise ValidationError(f"verdict.ratings.{dim}", f"rating must be one of {REVIEW_RATINGS}")
        if self.overall not in ("accept", "reject"):
            raise ValidationError("verdict.overall", f"must be 'accept' or 'reject', got {self.overall!r}")
        if self.overall == "reject":
            any_incorrect = any(r == "incorrect" for r in self.ratings.values())
            if not any_incorrect and not (self.note and self.note.strip()):
                raise ValidationError(
                    "verdict.overall",
                    "a rejection needs at least one 'incorrect' rating or an explanatory note",
                )

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "asset_id": self.asset_id,
            "reviewer_id": self.reviewer_id,
            "ratings": dict(self.ratings),
            "overall": self.overall,
            "note": self.note,
            "timestamp": self.timestamp,
        }
        out.update(self.extra)
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ReviewVerdict":
        ratings = _require(data, "ratings", "verdict.")
        if not isinstance(ratings, Mapping):
            raise _fail("verdict.ratings", "expected a mapping")
        note = data.get("note")
        ts = data.get("timestamp")
        return cls(
            asset_id=_str(_require(data, "asset_id", "verdict."), "verdict.asset_id"),
            reviewer_id=_str(_require(data, "reviewer_id", "verdict."), "verdict.reviewer_id"),
            ratings={_str(k, "verdict.ratings"): _str(v, f"verdict.ratings.{k}") for k, v in ratings.items()},
            overall=_str(_require(data, "overall", "verdict."), "verdict.overall"),
            note=None if note is None else _str(note, "verdict.note"),
            timestamp=None if ts is None else _str(ts, "verdict.timestamp"),
            extra=_extra(data, ("asset_id", "reviewer_id", "ratings", "overall", "note", "timestamp")),
        )
