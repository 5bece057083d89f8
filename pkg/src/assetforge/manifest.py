"""Manifest persistence.

A manifest is one JSON document per asset, written next to the mesh it
describes. JSON floats use shortest round-trip formatting, so a
save/load cycle reproduces every numeric field exactly. Writes go
through a temp file and an atomic rename; readers never observe a
partially written manifest.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from .errors import ManifestParseError
from .model import AssetRecord


def dumps_manifest(record: AssetRecord) -> str:
    record.validate()
    return json.dumps(record.to_dict(), indent=2) + "\n"


def loads_manifest(text: str) -> AssetRecord:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ManifestParseError(f"expected a JSON object at the top level, got {type(data).__name__}")
    record = AssetRecord.from_dict(data)
    record.validate()
    return record


def atomic_write_bytes(path: str | Path, data: bytes) -> None:
    """Write via temp file + rename so the target is always complete."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path: str | Path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def save_manifest(record: AssetRecord, path: str | Path) -> None:
    atomic_write_text(path, dumps_manifest(record))


def load_manifest(path: str | Path) -> AssetRecord:
    return loads_manifest(Path(path).read_text(encoding="utf-8"))
