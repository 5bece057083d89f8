"""Human review service over the asset store.

Read endpoints page through annotated assets and expose manifests,
render images, and grasp candidates; the one write endpoint appends
review verdicts. An asset is pending until anyone verdicts it. The
aggregate endpoint reports, per review dimension, how many verdicts
rated it correct, both as counts and as a percentage, so every number
a dashboard shows can be recomputed from the verdict files.

All routes live under ``/api/v1``. Verdict bodies are validated by the
domain type, not by framework models: malformed input gets 422 with the
failing field, an unknown asset 404, a repeat reviewer 409.
"""

from __future__ import annotations

import hashlib
import math
from datetime import datetime, timezone

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from .errors import ManifestParseError, ValidationError
from .model import REVIEW_DIMENSIONS, ReviewVerdict
from .store import AssetStore

DEFAULT_PAGE_SIZE = 20
MAX_PAGE_SIZE = 100


def _sample_key(asset_id: str) -> float:
    """Stable position of an asset in [0, 1) for subset sampling."""
    digest = hashlib.sha256(asset_id.encode()).digest()
    return int.from_bytes(digest[:8], "big") / 2**64


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _stage_status(store: AssetStore, asset_id: str) -> str | None:
    if not store.has_stage_log(asset_id):
        return None
    _, events = store.load_stage_log(asset_id)
    return events[-1].status if events else None


def accuracy_report(store: AssetStore) -> dict:
    """Per-dimension correct counts over every stored verdict."""
    verdicts = store.all_verdicts()
    dimensions = {}
    for dim in REVIEW_DIMENSIONS:
        rated = [v.ratings[dim] for v in verdicts if dim in v.ratings]
        correct = sum(1 for r in rated if r == "correct")
        total = len(rated)
        dimensions[dim] = {
            "correct": correct,
            "total": total,
            "accuracy_pct": None if total == 0 else 100.0 * correct / total,
        }
    accepts = sum(1 for v in verdicts if v.overall == "accept")
    return {
        "verdict_count": len(verdicts),
        "dimensions": dimensions,
        "overall": {
            "accept": accepts,
            "total": len(verdicts),
            "accept_rate_pct": None if not verdicts else 100.0 * accepts / len(verdicts),
        },
    }


def create_app(store: AssetStore, review_sample_rate: float | None = None) -> FastAPI:
    """Build the service; ``review_sample_rate`` in (0, 1] restricts the
    pending queue to a deterministic id-hash subset."""
    if review_sample_rate is not None and not 0.0 < review_sample_rate <= 1.0:
        raise ValueError(f"review_sample_rate must be in (0, 1], got {review_sample_rate}")

    app = FastAPI(title="asset review", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    def in_sample(asset_id: str) -> bool:
        return review_sample_rate is None or _sample_key(asset_id) < review_sample_rate

    @app.exception_handler(ValidationError)
    async def _validation(request: Request, exc: ValidationError):
        return JSONResponse(status_code=422, content={"detail": str(exc), "field": exc.field})

    @app.exception_handler(ManifestParseError)
    async def _parse(request: Request, exc: ManifestParseError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/api/v1/assets")
    def list_assets(status: str = "pending", page: int = 1, page_size: int = DEFAULT_PAGE_SIZE):
        if status not in ("pending", "annotated", "all"):
            return JSONResponse(status_code=422, content={"detail": f"unknown status {status!r}"})
        if page < 1 or not 1 <= page_size <= MAX_PAGE_SIZE:
            return JSONResponse(status_code=422, content={"detail": "bad paging parameters"})
        if status == "all":
            ids = store.list_assets()
        elif status == "annotated":
            ids = store.list_annotated()
        else:
            ids = [a for a in store.list_pending() if in_sample(a)]
        total = len(ids)
        start = (page - 1) * page_size
        rows = []
        for asset_id in ids[start : start + page_size]:
            renders = store.render_paths(asset_id)
            rows.append(
                {
                    "asset_id": asset_id,
                    "pending": not store.verdicts_for(asset_id),
                    "stage_status": _stage_status(store, asset_id),
                    "thumbnail_url": (
                        f"/api/v1/assets/{asset_id}/renders/0" if renders else None
                    ),
                    "verdict_count": len(store.verdicts_for(asset_id)),
                }
            )
        return {
            "assets": rows,
            "page": page,
            "page_size": page_size,
            "total": total,
            "total_pages": math.ceil(total / page_size),
        }

    @app.get("/api/v1/assets/{asset_id}")
    def asset_detail(asset_id: str):
        if not store.has_manifest(asset_id):
            return JSONResponse(status_code=404, content={"detail": f"no such asset {asset_id!r}"})
        record = store.load_manifest(asset_id)
        proposals_raw = 0
        grasps: list[dict] = []
        if store.candidates_path(asset_id).is_file():
            proposals_raw, judged = store.load_candidates(asset_id)
            grasps = [g.to_dict() for g in judged]
        verdicts = store.verdicts_for(asset_id)
        return {
            "asset_id": asset_id,
            "pending": not verdicts,
            "manifest": record.to_dict(),
            "render_urls": [
                f"/api/v1/assets/{asset_id}/renders/{i}" for i in range(len(store.render_paths(asset_id)))
            ],
            "proposals_raw": proposals_raw,
            "grasps": grasps,
            "verdicts": [v.to_dict() for v in verdicts],
        }

    @app.get("/api/v1/assets/{asset_id}/renders/{index}")
    def render_png(asset_id: str, index: int):
        paths = store.render_paths(asset_id)
        if not 0 <= index < len(paths):
            return JSONResponse(status_code=404, content={"detail": "no such render"})
        return Response(content=paths[index].read_bytes(), media_type="image/png")

    @app.post("/api/v1/assets/{asset_id}/verdicts", status_code=201)
    async def submit_verdict(asset_id: str, request: Request):
        if not store.has_manifest(asset_id):
            return JSONResponse(status_code=404, content={"detail": f"no such asset {asset_id!r}"})
        try:
            body = await request.json()
        except Exception:
            return JSONResponse(status_code=422, content={"detail": "body is not valid JSON"})
        if not isinstance(body, dict):
            return JSONResponse(status_code=422, content={"detail": "expected a JSON object"})
        body.setdefault("asset_id", asset_id)
        verdict = ReviewVerdict.from_dict(body)
        if verdict.timestamp is None:
            verdict = ReviewVerdict(
                asset_id=verdict.asset_id,
                reviewer_id=verdict.reviewer_id,
                ratings=verdict.ratings,
                overall=verdict.overall,
                note=verdict.note,
                timestamp=_now(),
                extra=verdict.extra,
            )
        verdict.validate()
        if verdict.asset_id != asset_id:
            return JSONResponse(
                status_code=422,
                content={"detail": f"verdict asset_id {verdict.asset_id!r} does not match URL"},
            )
        try:
            store.append_verdict(asset_id, verdict)
        except FileExistsError as exc:
            return JSONResponse(status_code=409, content={"detail": str(exc)})
        return {"status": "created", "asset_id": asset_id, "reviewer_id": verdict.reviewer_id}

    @app.get("/api/v1/review/accuracy")
    def review_accuracy():
        return accuracy_report(store)

    @app.get("/api/v1/stats")
    def pipeline_stats():
        from .pipeline import compute_stats

        return compute_stats(store).to_dict()

    return app


def serve(store_dir: str, host: str = "127.0.0.1", port: int = 8008, review_sample_rate: float | None = None):
    import uvicorn

    app = create_app(AssetStore(store_dir), review_sample_rate=review_sample_rate)
    uvicorn.run(app, host=host, port=port, log_level="warning")
