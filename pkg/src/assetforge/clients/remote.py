"""HTTP adapter for a remote annotation service.

Each protocol call becomes one POST to ``{base}/api/v1/annotate/{stage}``
carrying the stage name, asset id, an idempotency key, and a JSON
payload. Transport failures and 5xx responses are retried with
exponential backoff; anything else that prevents decoding a result
(4xx, malformed body, missing fields) raises ``TransportError``. A
failed quality gate is not an error: it arrives as a normal
``GateResult`` with ``passed`` false.
"""

from __future__ import annotations

import base64
import hashlib
import time
from collections.abc import Sequence
from typing import Any

import httpx
import numpy as np

from ..errors import ManifestParseError, TransportError
from ..model import (
    GraspPose,
    GripperModel,
    PointCloud,
    SemanticCaption,
    TriMesh,
)
from ..render import RenderView, to_png_bytes
from .base import GateResult, PointSelection, PropertyEstimate

STAGES = ("gate", "properties", "caption", "select_points", "propose_grasps")
DEFAULT_TIMEOUT = 30.0
DEFAULT_RETRIES = 3


# -- wire codecs -------------------------------------------------------


def encode_mesh(mesh: TriMesh) -> dict[str, Any]:
    return {"vertices": mesh.vertices.tolist(), "faces": mesh.faces.tolist()}


def decode_mesh(data: dict[str, Any]) -> TriMesh:
    return TriMesh(
        vertices=np.asarray(data["vertices"], dtype=np.float64),
        faces=np.asarray(data["faces"], dtype=np.int64),
    )


def encode_cloud(cloud: PointCloud) -> dict[str, Any]:
    return {
        "points": cloud.points.tolist(),
        "normals": None if cloud.normals is None else cloud.normals.tolist(),
    }


def decode_cloud(data: dict[str, Any]) -> PointCloud:
    normals = data.get("normals")
    return PointCloud(
        points=np.asarray(data["points"], dtype=np.float64),
        normals=None if normals is None else np.asarray(normals, dtype=np.float64),
    )


def encode_views(views: Sequence[RenderView]) -> list[dict[str, Any]]:
    return [
        {
            "view_index": v.view_index,
            "width": v.width,
            "height": v.height,
            "png_b64": base64.b64encode(to_png_bytes(v)).decode("ascii"),
        }
        for v in views
    ]


def idempotency_key(asset_id: str, stage: str) -> str:
    return hashlib.sha256(f"{asset_id}:{stage}".encode()).hexdigest()[:16]


class RemoteAnnotationClient:
    """AnnotationClient backed by an HTTP service.

    ``sleep`` is injectable so tests can retry without waiting.
    """

    def __init__(
        self,
        base_url: str,
        timeout: float = DEFAULT_TIMEOUT,
        retries: int = DEFAULT_RETRIES,
        backoff_base: float = 0.2,
        http: httpx.Client | None = None,
        sleep=time.sleep,
    ):
        self.base_url = base_url.rstrip("/")
        self.retries = retries
        self.backoff_base = backoff_base
        self._http = http if http is not None else httpx.Client(timeout=timeout)
        self._sleep = sleep

    def close(self) -> None:
        self._http.close()

    def __enter__(self) -> "RemoteAnnotationClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- transport ----------------------------------------------------

    def _post(self, stage: str, asset_id: str, payload: dict[str, Any]) -> dict[str, Any]:
        url = f"{self.base_url}/api/v1/annotate/{stage}"
        body = {
            "stage": stage,
            "asset_id": asset_id,
            "idempotency_key": idempotency_key(asset_id, stage),
            "payload": payload,
        }
        last_error: Exception | None = None
        for attempt in range(self.retries + 1):
            if attempt:
                self._sleep(self.backoff_base * 2 ** (attempt - 1))
            try:
                response = self._http.post(url, json=body)
            except httpx.HTTPError as exc:
                last_error = exc
                continue
            if response.status_code >= 500:
                last_error = TransportError(f"{stage}: server error {response.status_code}")
                continue
            if response.status_code != 200:
                raise TransportError(f"{stage}: unexpected status {response.status_code}: {response.text[:200]}")
            try:
                data = response.json()
            except ValueError as exc:
                raise TransportError(f"{stage}: response is not JSON: {exc}") from exc
            if not isinstance(data, dict):
                raise TransportError(f"{stage}: expected a JSON object, got {type(data).__name__}")
            return data
        raise TransportError(f"{stage}: giving up after {self.retries + 1} attempts: {last_error}")

    @staticmethod
    def _decode(stage: str, decoder, data: dict[str, Any]):
        try:
            return decoder(data)
        except (ManifestParseError, KeyError, TypeError, ValueError) as exc:
            raise TransportError(f"{stage}: malformed response: {exc}") from exc

    # -- protocol calls -------------------------------------------------

    def quality_gate(self, asset_id: str, mesh: TriMesh, views: Sequence[RenderView]) -> GateResult:
        data = self._post("gate", asset_id, {"mesh": encode_mesh(mesh), "views": encode_views(views)})
        result = self._decode("gate", GateResult.from_dict, data)
        result.validate()
        return result

    def estimate_properties(
        self, asset_id: str, mesh: TriMesh, views: Sequence[RenderView]
    ) -> PropertyEstimate:
        data = self._post("properties", asset_id, {"mesh": encode_mesh(mesh), "views": encode_views(views)})
        estimate = self._decode("properties", PropertyEstimate.from_dict, data)
        estimate.properties.validate()
        return estimate

    def caption(self, asset_id: str, mesh: TriMesh, views: Sequence[RenderView]) -> SemanticCaption:
        data = self._post("caption", asset_id, {"mesh": encode_mesh(mesh), "views": encode_views(views)})
        caption = self._decode("caption", lambda d: SemanticCaption.from_dict(d, "caption."), data)
        caption.validate()
        return caption

    def select_points(
        self, asset_id: str, candidates: PointCloud, views: Sequence[RenderView]
    ) -> PointSelection:
        data = self._post(
            "select_points", asset_id, {"candidates": encode_cloud(candidates), "views": encode_views(views)}
        )
        selection = self._decode("select_points", PointSelection.from_dict, data)
        selection.validate(candidate_count=len(candidates.points))
        return selection

    def propose_grasps(
        self, asset_id: str, cloud: PointCloud, gripper: GripperModel, max_n: int = 4000, seed: int = 0
    ) -> tuple[GraspPose, ...]:
        data = self._post(
            "propose_grasps",
            asset_id,
            {
                "cloud": encode_cloud(cloud),
                "gripper": gripper.to_dict(),
                "max_n": max_n,
                "seed": seed,
            },
        )

        def decode(d: dict[str, Any]) -> tuple[GraspPose, ...]:
            proposals = d["proposals"]
            if not isinstance(proposals, list):
                raise TypeError(f"proposals: expected a list, got {type(proposals).__name__}")
            return tuple(GraspPose.from_dict(p, f"proposals[{i}].") for i, p in enumerate(proposals))

        return self._decode("propose_grasps", decode, data)
