"""Minimal deterministic renderer for annotation and review imagery.

Orthographic projection, flat shading, one light at the camera. The
camera model is intentionally simple and fully specified here so other
code (and tests) can reproduce it:

* ``n`` view directions sit on a horizontal ring tilted ``RING_ELEVATION``
  above the horizon: ``d_i = (cos e cos a_i, cos e sin a_i, sin e)`` with
  azimuth ``a_i = 2 pi i / n``, pointing from the object to the camera.
* forward ``f = -d``; right ``r = f x z / |f x z|``; up ``u = r x f``.
* the mesh vertex centroid maps to the image center; world units scale
  by ``FIT_FRACTION * min(width, height) / (2 R)`` where ``R`` is the
  max vertex distance from the centroid, so every view fits the object.
* pixel centers sample at half-integer coordinates; +x right, +y down.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .errors import DegenerateMeshError
from .geometry import face_normals
from .model import TriMesh, ValidationError

RING_ELEVATION = math.radians(30.0)
FIT_FRACTION = 0.9
BACKGROUND = np.array([0, 0, 0], dtype=np.uint8)
BASE_SHADE = 0.25


@dataclass(frozen=True)
class RenderView:
    """One rendered image plus the camera that produced it."""

    view_index: int
    width: int
    height: int
    pixels: np.ndarray  # (height, width, 3) uint8
    camera_direction: tuple[float, float, float]  # object -> camera, unit
    camera_up: tuple[float, float, float]

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.uint8)
        if px.shape != (self.height, self.width, 3):
            raise ValidationError(
                "pixels", f"expected shape {(self.height, self.width, 3)}, got {px.shape}"
            )
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)


def view_directions(n_views: int) -> np.ndarray:
    """Unit directions from the object toward each camera."""
    if n_views <= 0:
        raise ValueError(f"need at least one view, got {n_views}")
    az = 2.0 * math.pi * np.arange(n_views) / n_views
    ce, se = math.cos(RING_ELEVATION), math.sin(RING_ELEVATION)
    return np.column_stack([ce * np.cos(az), ce * np.sin(az), np.full(n_views, se)])


def camera_basis(direction: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(forward, right, up) for a camera looking back along ``direction``."""
    forward = -np.asarray(direction, dtype=np.float64)
    forward = forward / np.linalg.norm(forward)
    right = np.cross(forward, np.array([0.0, 0.0, 1.0]))
    right = right / np.linalg.norm(right)
    up = np.cross(right, forward)
    return forward, right, up


def fit_scale(mesh: TriMesh, width: int, height: int) -> tuple[np.ndarray, float]:
    center = mesh.vertices.mean(axis=0)
    radius = float(np.sqrt(((mesh.vertices - center) ** 2).sum(axis=1)).max())
    if radius <= 0.0:
        raise DegenerateMeshError("mesh has zero spatial extent; nothing to render")
    return center, FIT_FRACTION * min(width, height) / (2.0 * radius)


def render_views(mesh: TriMesh, n_views: int = 8, width: int = 256, height: int = 256) -> list[RenderView]:
    """Rasterize the mesh from a ring of cameras. Deterministic."""
    if width <= 0 or height <= 0:
        raise ValueError("image dimensions must be positive")
    center, scale = fit_scale(mesh, width, height)
    normals = face_normals(mesh)
    views = []
    for i, direction in enumerate(view_directions(n_views)):
        forward, right, up = camera_basis(direction)
        rel = mesh.vertices - center
        px = width / 2.0 + scale * (rel @ right)
        py = height / 2.0 - scale * (rel @ up)
        depth = rel @ forward

        image = np.zeros((height, width, 3), dtype=np.uint8)
        zbuf = np.full((height, width), np.inf)
        shade = BASE_SHADE + (1.0 - BASE_SHADE) * np.abs(normals @ direction)
        for f_idx, (a, b, c) in enumerate(mesh.faces):
            _raster_triangle(
                image,
                zbuf,
                (px[a], py[a], depth[a]),
                (px[b], py[b], depth[b]),
                (px[c], py[c], depth[c]),
                int(round(255 * shade[f_idx])),
            )
        views.append(
            RenderView(
                view_index=i,
                width=width,
                height=height,
                pixels=image,
                camera_direction=tuple(float(v) for v in direction),
                camera_up=tuple(float(v) for v in up),
            )
        )
    return views


def _raster_triangle(image, zbuf, p0, p1, p2, value: int) -> None:
    height, width = zbuf.shape
    (x0, y0, z0), (x1, y1, z1), (x2, y2, z2) = p0, p1, p2
    area = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)
    if area == 0.0:
        return
    xmin = max(int(math.floor(min(x0, x1, x2) - 0.5)), 0)
    xmax = min(int(math.ceil(max(x0, x1, x2) + 0.5)), width - 1)
    ymin = max(int(math.floor(min(y0, y1, y2) - 0.5)), 0)
    ymax = min(int(math.ceil(max(y0, y1, y2) + 0.5)), height - 1)
    if xmin > xmax or ymin > ymax:
        return
    xs = np.arange(xmin, xmax + 1) + 0.5
    ys = np.arange(ymin, ymax + 1) + 0.5
    gx, gy = np.meshgrid(xs, ys)
    # barycentric weights; dividing by the signed area handles both windings
    l1 = ((gx - x0) * (y2 - y0) - (x2 - x0) * (gy - y0)) / area
    l2 = ((x1 - x0) * (gy - y0) - (gx - x0) * (y1 - y0)) / area
    l0 = 1.0 - l1 - l2
    inside = (l0 >= 0.0) & (l1 >= 0.0) & (l2 >= 0.0)
    if not inside.any():
        return
    z = l0 * z0 + l1 * z1 + l2 * z2
    sub_z = zbuf[ymin : ymax + 1, xmin : xmax + 1]
    win = inside & (z < sub_z)
    sub_z[win] = z[win]
    image[ymin : ymax + 1, xmin : xmax + 1][win] = value


def to_png_bytes(view: RenderView) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(view.pixels, mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def silhouette_bbox(view: RenderView) -> tuple[int, int, int, int] | None:
    """Pixel bounds (xmin, ymin, xmax, ymax) of non-background pixels."""
    mask = (view.pixels != BACKGROUND).any(axis=2)
    if not mask.any():
        return None
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    return int(cols[0]), int(rows[0]), int(cols[-1]), int(rows[-1])
