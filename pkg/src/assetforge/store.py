"""File-tree persistence: one directory per asset, no database.

::

    <root>/
      assets/<asset_id>/
        source.obj       raw ingested mesh
        mesh.obj         rescaled working mesh
        manifest.json    consolidated record (timestamp-free, byte-stable)
        candidates.json  all grasp candidates with verification outcomes
        stage_log.json   ordered stage events with wall-clock timestamps
        renders/view_00.png ...
        verdicts.jsonl   append-only review verdicts
      layouts/           scene layout exports
      vqa/               question/answer exports

All whole-file writes go through write-temp-then-rename; verdict
appends are serialized per asset so concurrent reviewers cannot
interleave half-written lines.
"""

from __future__ import annotations

import json
import re
import threading
from collections import defaultdict
from collections.abc import Sequence
from pathlib import Path

from .errors import ManifestParseError, ValidationError
from .geometry import load_mesh, write_obj
from .manifest import atomic_write_bytes, atomic_write_text, dumps_manifest, loads_manifest
from .model import AssetRecord, GraspPose, ReviewVerdict, StageEvent, TriMesh
from .render import RenderView, to_png_bytes

_ASSET_ID_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_.-]*$")


def check_asset_id(asset_id: str) -> str:
    """Asset ids double as directory names; keep them filesystem-safe."""
    if not _ASSET_ID_RE.match(asset_id):
        raise ValidationError("asset_id", f"unusable as a directory name: {asset_id!r}")
    return asset_id


class AssetStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.assets_root = self.root / "assets"
        self.layouts_root = self.root / "layouts"
        self.vqa_root = self.root / "vqa"
        for path in (self.assets_root, self.layouts_root, self.vqa_root):
            path.mkdir(parents=True, exist_ok=True)
        self._verdict_locks: defaultdict[str, threading.Lock] = defaultdict(threading.Lock)
        self._locks_guard = threading.Lock()

    # -- paths --------------------------------------------------------

    def asset_dir(self, asset_id: str) -> Path:
        return self.assets_root / check_asset_id(asset_id)

    def source_mesh_path(self, asset_id: str) -> Path:
        return self.asset_dir(asset_id) / "source.obj"

    def mesh_path(self, asset_id: str) -> Path:
        return self.asset_dir(asset_id) / "mesh.obj"

    def manifest_path(self, asset_id: str) -> Path:
        return self.asset_dir(asset_id) / "manifest.json"

    def candidates_path(self, asset_id: str) -> Path:
        return self.asset_dir(asset_id) / "candidates.json"

    def stage_log_path(self, asset_id: str) -> Path:
        return self.asset_dir(asset_id) / "stage_log.json"

    def renders_dir(self, asset_id: str) -> Path:
        return self.asset_dir(asset_id) / "renders"

    def verdicts_path(self, asset_id: str) -> Path:
        return self.asset_dir(asset_id) / "verdicts.jsonl"

    # -- meshes -------------------------------------------------------

    def save_mesh(self, asset_id: str, mesh: TriMesh, name: str = "mesh.obj") -> Path:
        path = self.asset_dir(asset_id) / name
        path.parent.mkdir(parents=True, exist_ok=True)
        atomic_write_bytes(path, write_obj(mesh))
        return path

    def load_mesh(self, asset_id: str, name: str = "mesh.obj") -> TriMesh:
        return load_mesh((self.asset_dir(asset_id) / name).read_bytes())

    # -- manifests ----------------------------------------------------

    def save_manifest(self, asset_id: str, record: AssetRecord) -> Path:
        if record.asset_id != asset_id:
            raise ValidationError("asset_id", f"record {record.asset_id!r} saved under {asset_id!r}")
        path = self.manifest_path(asset_id)
        path.parent.mkdir(parents=True, exist_ok=True)
        atomic_write_text(path, dumps_manifest(record))
        return path

    def load_manifest(self, asset_id: str) -> AssetRecord:
        return loads_manifest(self.manifest_path(asset_id).read_text())

    def has_manifest(self, asset_id: str) -> bool:
        return self.manifest_path(asset_id).is_file()

    # -- candidates ---------------------------------------------------

    def save_candidates(self, asset_id: str, proposals_raw: int, candidates: Sequence[GraspPose]) -> Path:
        payload = {
            "asset_id": asset_id,
            "proposals_raw": proposals_raw,
            "candidates": [c.to_dict() for c in candidates],
        }
        path = self.candidates_path(asset_id)
        path.parent.mkdir(parents=True, exist_ok=True)
        atomic_write_text(path, json.dumps(payload, indent=2) + "\n")
        return path

    def load_candidates(self, asset_id: str) -> tuple[int, tuple[GraspPose, ...]]:
        data = json.loads(self.candidates_path(asset_id).read_text())
        raw = data.get("proposals_raw")
        if not isinstance(raw, int) or isinstance(raw, bool) or raw < 0:
            raise ManifestParseError(f"field proposals_raw: expected a non-negative count, got {raw!r}")
        items = data.get("candidates")
        if not isinstance(items, list):
            raise ManifestParseError("field candidates: expected a list")
        return raw, tuple(GraspPose.from_dict(d, f"candidates[{i}].") for i, d in enumerate(items))

    # -- renders ------------------------------------------------------

    def save_renders(self, asset_id: str, views: Sequence[RenderView]) -> list[Path]:
        directory = self.renders_dir(asset_id)
        directory.mkdir(parents=True, exist_ok=True)
        paths = []
        for view in views:
            path = directory / f"view_{view.view_index:02d}.png"
            atomic_write_bytes(path, to_png_bytes(view))
            paths.append(path)
        return paths

    def render_paths(self, asset_id: str) -> list[Path]:
        directory = self.renders_dir(asset_id)
        if not directory.is_dir():
            return []
        return sorted(directory.glob("view_*.png"))

    # -- stage log ----------------------------------------------------

    def save_stage_log(self, asset_id: str, fingerprint: str, events: Sequence[StageEvent]) -> Path:
        payload = {
            "asset_id": asset_id,
            "fingerprint": fingerprint,
            "events": [e.to_dict() for e in events],
        }
        path = self.stage_log_path(asset_id)
        path.parent.mkdir(parents=True, exist_ok=True)
        atomic_write_text(path, json.dumps(payload, indent=2) + "\n")
        return path

    def load_stage_log(self, asset_id: str) -> tuple[str, tuple[StageEvent, ...]]:
        data = json.loads(self.stage_log_path(asset_id).read_text())
        fingerprint = data.get("fingerprint")
        if not isinstance(fingerprint, str):
            raise ManifestParseError("field fingerprint: expected a string")
        events = data.get("events")
        if not isinstance(events, list):
            raise ManifestParseError("field events: expected a list")
        return fingerprint, tuple(StageEvent.from_dict(e, f"events[{i}].") for i, e in enumerate(events))

    def has_stage_log(self, asset_id: str) -> bool:
        return self.stage_log_path(asset_id).is_file()

    # -- verdicts -----------------------------------------------------

    def _verdict_lock(self, asset_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._verdict_locks[asset_id]

    def verdicts_for(self, asset_id: str) -> tuple[ReviewVerdict, ...]:
        path = self.verdicts_path(asset_id)
        if not path.is_file():
            return ()
        verdicts = []
        for line_no, line in enumerate(path.read_text().splitlines(), start=1):
            if not line.strip():
                continue
            try:
                verdicts.append(ReviewVerdict.from_dict(json.loads(line)))
            except json.JSONDecodeError as exc:
                raise ManifestParseError(f"{path}:{line_no}: {exc.msg}") from exc
        return tuple(verdicts)

    def append_verdict(self, asset_id: str, verdict: ReviewVerdict) -> None:
        """Append one verdict; rejects a second verdict from the same
        reviewer for the same asset. Never rewrites existing lines."""
        verdict.validate()
        if verdict.asset_id != asset_id:
            raise ValidationError("verdict.asset_id", f"{verdict.asset_id!r} posted to {asset_id!r}")
        with self._verdict_lock(asset_id):
            existing = self.verdicts_for(asset_id)
            if any(v.reviewer_id == verdict.reviewer_id for v in existing):
                raise FileExistsError(
                    f"reviewer {verdict.reviewer_id!r} already submitted a verdict for {asset_id!r}"
                )
            path = self.verdicts_path(asset_id)
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "a", encoding="utf-8") as handle:
                handle.write(json.dumps(verdict.to_dict()) + "\n")

    def all_verdicts(self) -> tuple[ReviewVerdict, ...]:
        verdicts: list[ReviewVerdict] = []
        for asset_id in self.list_assets():
            verdicts.extend(self.verdicts_for(asset_id))
        return tuple(verdicts)

    # -- listings -----------------------------------------------------

    def list_assets(self) -> list[str]:
        """Every asset directory, sorted; presence of any artifact counts."""
        if not self.assets_root.is_dir():
            return []
        return sorted(p.name for p in self.assets_root.iterdir() if p.is_dir())

    def list_annotated(self) -> list[str]:
        return [a for a in self.list_assets() if self.has_manifest(a)]

    def list_pending(self) -> list[str]:
        """Annotated assets that nobody has reviewed yet."""
        return [a for a in self.list_annotated() if not self.verdicts_for(a)]
