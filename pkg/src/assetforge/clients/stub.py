"""In-process HTTP stand-in for a real annotation service.

Wraps any in-memory AnnotationClient (normally the mock) behind the
same wire surface ``RemoteAnnotationClient`` speaks, so the adapter can
be exercised end to end without a network. Failure injection:

- ``fail_first={"gate": 2}``: respond 500 to the first two gate calls.
- ``drop_fields={"properties": "mass"}``: delete a key from the JSON
  response, anywhere it appears, to simulate a contract break.

The server records every request body for assertions.
"""

from __future__ import annotations

import json
import threading
from contextlib import contextmanager
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Any

from ..model import GripperModel
from .base import AnnotationClient
from .remote import decode_cloud, decode_mesh

_STAGE_PATH_PREFIX = "/api/v1/annotate/"


def _drop_key(data: Any, key: str) -> Any:
    if isinstance(data, dict):
        return {k: _drop_key(v, key) for k, v in data.items() if k != key}
    if isinstance(data, list):
        return [_drop_key(v, key) for v in data]
    return data


class AnnotationStub:
    def __init__(
        self,
        client: AnnotationClient,
        fail_first: dict[str, int] | None = None,
        drop_fields: dict[str, str] | None = None,
    ):
        self.client = client
        self.fail_remaining = dict(fail_first or {})
        self.drop_fields = dict(drop_fields or {})
        self.requests: list[dict[str, Any]] = []
        self._lock = threading.Lock()

    def handle(self, stage: str, body: dict[str, Any]) -> tuple[int, dict[str, Any]]:
        with self._lock:
            self.requests.append(body)
            if self.fail_remaining.get(stage, 0) > 0:
                self.fail_remaining[stage] -= 1
                return 500, {"detail": f"injected failure for {stage}"}
        asset_id = body["asset_id"]
        payload = body["payload"]
        if stage == "gate":
            result = self.client.quality_gate(asset_id, decode_mesh(payload["mesh"]), ()).to_dict()
        elif stage == "properties":
            result = self.client.estimate_properties(asset_id, decode_mesh(payload["mesh"]), ()).to_dict()
        elif stage == "caption":
            result = self.client.caption(asset_id, decode_mesh(payload["mesh"]), ()).to_dict()
        elif stage == "select_points":
            result = self.client.select_points(asset_id, decode_cloud(payload["candidates"]), ()).to_dict()
        elif stage == "propose_grasps":
            proposals = self.client.propose_grasps(
                asset_id,
                decode_cloud(payload["cloud"]),
                GripperModel.from_dict(payload["gripper"]),
                max_n=payload["max_n"],
                seed=payload["seed"],
            )
            result = {"proposals": [p.to_dict() for p in proposals]}
        else:
            return 404, {"detail": f"unknown stage {stage!r}"}
        if stage in self.drop_fields:
            result = _drop_key(result, self.drop_fields[stage])
        return 200, result


class _Handler(BaseHTTPRequestHandler):
    stub: AnnotationStub  # assigned by the server factory

    def log_message(self, *args):  # silence request logging in tests
        pass

    def do_POST(self):
        if not self.path.startswith(_STAGE_PATH_PREFIX):
            self._reply(404, {"detail": "not found"})
            return
        stage = self.path[len(_STAGE_PATH_PREFIX) :]
        length = int(self.headers.get("Content-Length", "0"))
        try:
            body = json.loads(self.rfile.read(length))
            status, result = self.stub.handle(stage, body)
        except Exception as exc:  # stub bug or malformed request
            status, result = 500, {"detail": f"{type(exc).__name__}: {exc}"}
        self._reply(status, result)

    def _reply(self, status: int, data: dict[str, Any]):
        raw = json.dumps(data).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(raw)))
        self.end_headers()
        self.wfile.write(raw)


@contextmanager
def annotation_stub(
    client: AnnotationClient,
    fail_first: dict[str, int] | None = None,
    drop_fields: dict[str, str] | None = None,
):
    """Run the stub on an ephemeral port; yields (stub, base_url)."""
    stub = AnnotationStub(client, fail_first=fail_first, drop_fields=drop_fields)
    handler = type("BoundHandler", (_Handler,), {"stub": stub})
    server = ThreadingHTTPServer(("127.0.0.1", 0), handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield stub, f"http://127.0.0.1:{server.server_port}"
    finally:
        server.shutdown()
        server.server_close()
        thread.join(timeout=5)
