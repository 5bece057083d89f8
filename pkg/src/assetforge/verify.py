"""Quasi-static grasp verification.

A cheap, deterministic stand-in for dropping the grasp into a physics
engine. The checks run in a fixed order and the first failure names the
outcome:

1. ``check_penetration``: the open gripper must not already intersect
   the mesh.
2. ``close_fingers``: translate each finger along the jaw axis to its
   first triangle hit; fewer than two contacts means nothing to hold.
3. ``force_closure``: the contact pair must sit inside both friction
   cones.
4. ``slide_resistance``: friction capacity must beat gravity plus a
   test acceleration.

A grasp that survives all four is recorded as held for the minimum
stable frame count with zero displacement. Verification here is an
analytic oracle, not an engine rollout; manifests flag it as such.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import face_cross_products, quat_to_matrix
from .model import (
    DEFAULT_GRIPPER,
    DISPLACEMENT_THRESHOLD,
    MIN_STABLE_FRAMES,
    GraspPose,
    GripperModel,
    PhysicalProperties,
    TriMesh,
    VerificationOutcome,
)

GRAVITY = 9.81
TEST_ACCELERATION = 5.0  # m/s^2 shake the grasp must survive
# Displacement reported when the slide check fails: past the threshold,
# distinct from the zero of a clean hold.
SLIDE_FAIL_DISPLACEMENT = 0.02

_AXIS_EPS = 1e-12


@dataclass(frozen=True)
class Contact:
    """A finger-object touch: where, which way the surface faces, and
    how far the finger traveled to get there."""

    position: np.ndarray
    normal: np.ndarray
    finger: str  # "left" or "right"
    triangle_index: int
    travel: float


def gripper_boxes(gripper: GripperModel, opening: float | None = None) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """Axis-aligned collision boxes in the gripper frame.

    Frame: origin at the grasp center between the fingertips, x along
    the jaw (closing) axis, z from palm toward fingertips. Returns
    ``name -> (center, half_extents)``.
    """
    w = gripper.max_opening if opening is None else opening
    t = gripper.finger_thickness
    length = gripper.finger_length
    pd = gripper.palm_depth
    finger_half = np.array([t / 2.0, t / 2.0, length / 2.0])
    return {
        "left": (np.array([-(w / 2.0 + t / 2.0), 0.0, -length / 2.0]), finger_half),
        "right": (np.array([w / 2.0 + t / 2.0, 0.0, -length / 2.0]), finger_half),
        "palm": (np.array([0.0, 0.0, -length - pd / 2.0]), np.array([w / 2.0 + t, t / 2.0, pd / 2.0])),
    }


def _mesh_in_gripper_frame(mesh: TriMesh, grasp: GraspPose) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    rotation = quat_to_matrix(grasp.orientation)
    local = (mesh.vertices - np.array(grasp.position)) @ rotation
    tris = local[mesh.faces]
    return tris, rotation, local


def _sat_quantities(tris: np.ndarray, half: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-axis projections for the 13 separating axis tests.

    Returns (radius, tri_min, tri_max), each of shape (m, 13), for
    triangles already expressed relative to the box center.
    """
    m = tris.shape[0]
    edges = np.stack(
        [tris[:, 1] - tris[:, 0], tris[:, 2] - tris[:, 1], tris[:, 0] - tris[:, 2]], axis=1
    )  # (m, 3, 3)
    axes = np.empty((m, 13, 3))
    axes[:, 0:3] = np.eye(3)
    axes[:, 3] = np.cross(edges[:, 0], edges[:, 1])
    for k in range(3):
        unit = np.zeros(3)
        unit[k] = 1.0
        axes[:, 4 + 3 * k : 7 + 3 * k] = np.cross(unit, edges)
    radius = np.abs(axes) @ half  # (m, 13)
    proj = np.einsum("mvj,maj->mav", tris, axes)  # (m, 13, 3)
    return radius, proj.min(axis=2), proj.max(axis=2)


def triangles_intersect_box(tris: np.ndarray, center: np.ndarray, half: np.ndarray) -> np.ndarray:
    """Boolean mask of triangles overlapping an axis-aligned box.

    Standard 13-axis separating axis test; touching counts as overlap.
    ``tris`` has shape (m, 3, 3).
    """
    if tris.shape[0] == 0:
        return np.zeros(0, dtype=bool)
    radius, tmin, tmax = _sat_quantities(tris - center, half)
    return ((tmin <= radius) & (tmax >= -radius)).all(axis=1)


def sweep_first_hit(
    tris: np.ndarray,
    center: np.ndarray,
    half: np.ndarray,
    direction: np.ndarray,
    max_travel: float,
) -> tuple[float, int] | None:
    """First contact of a box translating along ``direction``.

    For each separating axis the admissible travel is an interval;
    intersecting all 13 intervals per triangle gives the exact touch
    distance with no marching. Returns ``(travel, triangle_index)`` for
    the earliest hit within ``[0, max_travel]`` (lowest index on ties),
    or None.
    """
    if tris.shape[0] == 0:
        return None
    radius, tmin, tmax = _sat_quantities(tris - center, half)
    m = tris.shape[0]
    edges_axes_shift = np.empty((m, 13))
    # rebuild the axes only for their dot with the motion; cheaper than
    # returning them from _sat_quantities
    edges = np.stack(
        [tris[:, 1] - tris[:, 0], tris[:, 2] - tris[:, 1], tris[:, 0] - tris[:, 2]], axis=1
    )
    edges_axes_shift[:, 0:3] = direction
    edges_axes_shift[:, 3] = np.cross(edges[:, 0], edges[:, 1]) @ direction
    for k in range(3):
        unit = np.zeros(3)
        unit[k] = 1.0
        edges_axes_shift[:, 4 + 3 * k : 7 + 3 * k] = np.cross(unit, edges) @ direction

    s = edges_axes_shift
    lo = np.full((m, 13), -np.inf)
    hi = np.full((m, 13), np.inf)
    moving = np.abs(s) > _AXIS_EPS
    pos, neg = moving & (s > 0), moving & (s < 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        lo[pos] = ((tmin - radius) / s)[pos]
        hi[pos] = ((tmax + radius) / s)[pos]
        lo[neg] = ((tmax + radius) / s)[neg]
        hi[neg] = ((tmin - radius) / s)[neg]
    static_fail = ~moving & ~((tmin <= radius) & (tmax >= -radius))
    lo[static_fail] = np.inf
    hi[static_fail] = -np.inf

    t_lo = lo.max(axis=1)
    t_hi = hi.min(axis=1)
    first = np.maximum(t_lo, 0.0)
    hit = (t_lo <= t_hi) & (t_hi >= 0.0) & (first <= max_travel)
    if not hit.any():
        return None
    first = np.where(hit, first, np.inf)
    idx = int(np.argmin(first))
    return float(first[idx]), idx


def _clip_polygon_halfspace(poly: list[np.ndarray], axis: int, bound: float, keep_below: bool) -> list[np.ndarray]:
    out: list[np.ndarray] = []
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        fa = a[axis] - bound
        fb = b[axis] - bound
        if keep_below:
            ina, inb = fa <= 0, fb <= 0
        else:
            ina, inb = fa >= 0, fb >= 0
        if ina:
            out.append(a)
        if ina != inb and fb != fa:
            t = fa / (fa - fb)
            out.append(a + t * (b - a))
    return out


def clip_triangle_to_box(tri: np.ndarray, center: np.ndarray, half: np.ndarray, grow: float) -> list[np.ndarray]:
    poly = [tri[0], tri[1], tri[2]]
    for axis in range(3):
        poly = _clip_polygon_halfspace(poly, axis, center[axis] + half[axis] + grow, True)
        if not poly:
            return poly
        poly = _clip_polygon_halfspace(poly, axis, center[axis] - half[axis] - grow, False)
        if not poly:
            return poly
    return poly


def check_penetration(mesh: TriMesh, grasp: GraspPose, gripper: GripperModel = DEFAULT_GRIPPER) -> bool:
    """True when the fully open gripper already intersects the mesh."""
    tris, _, _ = _mesh_in_gripper_frame(mesh, grasp)
    for center, half in gripper_boxes(gripper).values():
        if triangles_intersect_box(tris, center, half).any():
            return True
    return False


def close_fingers(
    mesh: TriMesh, grasp: GraspPose, gripper: GripperModel = DEFAULT_GRIPPER
) -> tuple[Contact, ...]:
    """Translate each finger along the jaw axis to its first triangle hit.

    The sweep spans the full opening width. Each finger contributes at
    most one contact: the centroid of the touching patch (the triangle
    clipped to the finger box at the hit) and the face normal oriented
    against the finger's motion. No hit within the sweep means that
    finger stays contact-free; callers decide whether a partial set is
    usable.
    """
    tris, rotation, _ = _mesh_in_gripper_frame(mesh, grasp)
    boxes = gripper_boxes(gripper)
    cross = face_cross_products(mesh)
    contacts = []
    for finger, sign in (("left", 1.0), ("right", -1.0)):
        center, half = boxes[finger]
        direction = np.array([sign, 0.0, 0.0])
        hit = sweep_first_hit(tris, center, half, direction, gripper.max_opening)
        if hit is None:
            continue
        travel, tri_idx = hit
        touched_center = center + travel * direction
        grow = 1e-9
        poly: list[np.ndarray] = []
        while not poly and grow < 1e-3:
            poly = clip_triangle_to_box(tris[tri_idx], touched_center, half, grow)
            grow *= 1000.0
        if not poly:  # pathological touch; fall back to the nearest vertex
            poly = [tris[tri_idx][np.argmin(np.abs(tris[tri_idx] - touched_center).sum(axis=1))]]
        local_point = np.mean(poly, axis=0)
        world_point = rotation @ local_point + np.array(grasp.position)
        normal = cross[tri_idx] / np.linalg.norm(cross[tri_idx])
        motion_world = rotation @ direction
        if normal @ motion_world > 0:  # face the approaching finger
            normal = -normal
        contacts.append(
            Contact(
                position=world_point,
                normal=normal,
                finger=finger,
                triangle_index=tri_idx,
                travel=travel,
            )
        )
    return tuple(contacts)


def force_closure(contacts: tuple[Contact, ...], mu: float) -> bool:
    """Two-contact antipodal force closure test.

    True when the line between the contacts lies inside both friction
    cones (half angle ``atan(mu)``). Fewer than two contacts cannot
    close, and a frictionless pinch (``mu == 0``) never does: the cone
    degenerates to a line and the pair cannot resist lateral loads.
    """
    if mu < 0:
        raise ValueError(f"friction coefficient must be non-negative, got {mu}")
    if len(contacts) < 2:
        return False
    if mu == 0.0:
        return False
    c1, c2 = contacts[0], contacts[1]
    axis = c2.position - c1.position
    norm = np.linalg.norm(axis)
    if norm < 1e-12:
        return False
    axis = axis / norm
    cone = math.atan(mu)
    for contact, direction in ((c1, axis), (c2, -axis)):
        cos_angle = abs(float(contact.normal @ direction))
        angle = math.acos(min(1.0, cos_angle))
        if angle > cone:
            return False
    return True


@dataclass(frozen=True)
class SlideResult:
    passed: bool
    max_displacement: float


def slide_directions(contacts: tuple[Contact, ...]) -> tuple[np.ndarray, ...]:
    """Four shake directions orthogonal to the contact line."""
    axis = contacts[1].position - contacts[0].position
    norm = np.linalg.norm(axis)
    axis = axis / norm if norm > 0 else np.array([1.0, 0.0, 0.0])
    ref = np.eye(3)[int(np.argmin(np.abs(axis)))]
    v = np.cross(axis, ref)
    v = v / np.linalg.norm(v)
    w = np.cross(axis, v)
    return (v, -v, w, -w)


def slide_resistance(
    contacts: tuple[Contact, ...],
    mu: float,
    squeeze_force: float,
    mass: float,
    directions: tuple[np.ndarray, ...] | None = None,
    test_acceleration: float = TEST_ACCELERATION,
) -> SlideResult:
    """Quasi-static hold check against gravity plus a test shake.

    The two finger pads press with ``squeeze_force`` each, so friction
    can resist ``2 * mu * squeeze_force``; the load is
    ``mass * (g + test_acceleration)`` in every probed direction. A
    failed hold reports the slide displacement sentinel, past the
    stability threshold.
    """
    if mass <= 0 or not math.isfinite(mass):
        raise ValueError(f"mass must be positive and finite, got {mass}")
    if mu < 0:
        raise ValueError(f"friction coefficient must be non-negative, got {mu}")
    if squeeze_force <= 0:
        raise ValueError(f"squeeze force must be positive, got {squeeze_force}")
    if directions is None:
        directions = slide_directions(contacts) if len(contacts) >= 2 else (np.array([1.0, 0.0, 0.0]),)
    capacity = 2.0 * mu * squeeze_force
    demand = mass * (GRAVITY + test_acceleration)
    held = all(capacity >= demand for _ in directions)
    return SlideResult(passed=held, max_displacement=0.0 if held else SLIDE_FAIL_DISPLACEMENT)


def verify_grasp(
    mesh: TriMesh,
    physical: PhysicalProperties,
    grasp: GraspPose,
    gripper: GripperModel = DEFAULT_GRIPPER,
    *,
    displacement_threshold: float = DISPLACEMENT_THRESHOLD,
    test_acceleration: float = TEST_ACCELERATION,
) -> VerificationOutcome:
    """Run the four checks in order; the first failure is the outcome."""
    if check_penetration(mesh, grasp, gripper):
        return VerificationOutcome(False, "penetration", 0, 0.0)
    contacts = close_fingers(mesh, grasp, gripper)
    if len(contacts) < 2:
        return VerificationOutcome(False, "no_contact", 0, 0.0)
    if not force_closure(contacts, physical.friction):
        return VerificationOutcome(False, "not_force_closure", 0, 0.0)
    slide = slide_resistance(
        contacts,
        physical.friction,
        gripper.squeeze_force,
        physical.mass,
        test_acceleration=test_acceleration,
    )
    if slide.max_displacement >= displacement_threshold:
        return VerificationOutcome(False, "slide_failure", 0, slide.max_displacement)
    return VerificationOutcome(True, "none", MIN_STABLE_FRAMES, slide.max_displacement)
