"""Batch orchestration: meshes in, consolidated asset manifests out.

Per asset the stages run in a fixed order:

    load -> rescale -> render -> gate -> properties -> caption ->
    sample -> fps -> select_points -> propose -> proximity -> fps7 ->
    associate -> verify -> placement -> consolidate

Assets are independent, so a bounded thread pool processes them in
parallel and nothing is shared but the store. Every randomized stage
draws its seed from ``hash(global_seed, asset_id, stage)``; outputs are
a pure function of (mesh bytes, config), which is what makes reruns
byte-identical and skippable. A rerun consults each asset's stage log:
matching config fingerprint plus a terminal status means zero work.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

from .clients.base import AnnotationClient
from .clients.mock import MockAnnotationClient
from .errors import StatsIntegrityError, ValidationError
from .geometry import (
    default_fps_seed,
    farthest_point_sampling,
    load_mesh,
    make_placement,
    rescale_to_dims,
    surface_sample,
)
from .graspfilter import (
    GRASP_FPS_K,
    PROXIMITY_THRESHOLD,
    associate_semantics,
    fps_7dof,
    proximity_filter,
)
from .manifest import atomic_write_bytes
from .model import (
    DEFAULT_GRIPPER,
    DISPLACEMENT_THRESHOLD,
    AssetRecord,
    GripperModel,
    PipelineStats,
    PointCloud,
    StageEvent,
)
from .render import render_views
from .store import AssetStore, check_asset_id
from .verify import TEST_ACCELERATION, verify_grasp

SURFACE_SAMPLES = 20000
FPS_CANDIDATES = 42
MAX_PROPOSALS = 4000
N_RENDERS = 8
RENDER_SIZE = 256

STAGE_ORDER = (
    "load",
    "rescale",
    "render",
    "gate",
    "properties",
    "caption",
    "sample",
    "fps",
    "select_points",
    "propose",
    "proximity",
    "fps7",
    "associate",
    "verify",
    "placement",
    "consolidate",
)


@dataclass(frozen=True)
class PipelineConfig:
    input_dir: str | None
    store_dir: str
    client_mode: str = "mock"
    remote_base_url: str | None = None
    seed: int = 0
    surface_samples: int = SURFACE_SAMPLES
    fps_candidates: int = FPS_CANDIDATES
    max_proposals: int = MAX_PROPOSALS
    proximity_threshold: float = PROXIMITY_THRESHOLD
    grasp_fps_k: int = GRASP_FPS_K
    n_renders: int = N_RENDERS
    render_size: int = RENDER_SIZE
    displacement_threshold: float = DISPLACEMENT_THRESHOLD
    test_acceleration: float = TEST_ACCELERATION
    target_longest_axis: float | None = None
    gripper: GripperModel = DEFAULT_GRIPPER
    workers: int = 4
    remote_timeout: float = 30.0

    def __post_init__(self):
        if self.client_mode not in ("mock", "remote"):
            raise ValidationError("client_mode", f"must be 'mock' or 'remote', got {self.client_mode!r}")
        if self.client_mode == "remote" and not self.remote_base_url:
            raise ValidationError("remote_base_url", "required when client_mode is 'remote'")
        if self.workers < 1:
            raise ValidationError("workers", f"must be >= 1, got {self.workers}")
        for name in ("surface_samples", "fps_candidates", "max_proposals", "grasp_fps_k", "n_renders"):
            if getattr(self, name) < 1:
                raise ValidationError(name, f"must be >= 1, got {getattr(self, name)}")

    def fingerprint(self) -> str:
        """Hash of every parameter that can change stage outputs.

        Paths and worker count are excluded: the same meshes under the
        same ids must hash the same wherever they live, and parallelism
        never changes results.
        """
        relevant = dataclasses.asdict(self)
        for name in ("input_dir", "store_dir", "workers", "remote_timeout"):
            relevant.pop(name)
        blob = json.dumps(relevant, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def build_client(config: PipelineConfig) -> AnnotationClient:
    if config.client_mode == "mock":
        return MockAnnotationClient()
    from .clients.remote import RemoteAnnotationClient  # httpx only when needed

    return RemoteAnnotationClient(config.remote_base_url, timeout=config.remote_timeout)


def stage_seed(global_seed: int, asset_id: str, stage: str) -> int:
    digest = hashlib.sha256(f"{global_seed}:{asset_id}:{stage}".encode()).digest()
    return int.from_bytes(digest[:4], "big")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def ingest_assets(store: AssetStore, input_dir: str | Path) -> list[str]:
    """Copy every .obj under ``input_dir`` into the store as source.obj.

    The asset id is the file stem; duplicate stems get numeric
    suffixes in sorted-path order. Content-identical copies are
    skipped so reruns leave mtimes alone.
    """
    paths = sorted(Path(input_dir).glob("*.obj"))
    seen: set[str] = set()
    ids = []
    for path in paths:
        asset_id = path.stem
        suffix = 2
        while asset_id in seen:
            asset_id = f"{path.stem}-{suffix}"
            suffix += 1
        seen.add(asset_id)
        check_asset_id(asset_id)
        ids.append(asset_id)
        try:
            data = path.read_bytes()
        except OSError:
            continue  # missing source surfaces as a load-stage error
        target = store.source_mesh_path(asset_id)
        if not (target.is_file() and target.read_bytes() == data):
            target.parent.mkdir(parents=True, exist_ok=True)
            atomic_write_bytes(target, data)
    return ids


def _rescale_target(config: PipelineConfig, client: AnnotationClient, asset_id: str) -> float | None:
    if config.target_longest_axis is not None:
        return config.target_longest_axis
    fixture_for = getattr(client, "fixture_for", None)
    if fixture_for is None:
        return None
    try:
        target = fixture_for(asset_id).get("target_longest_axis")
    except KeyError:
        return None
    return float(target) if target is not None else None


@dataclass
class _AssetRun:
    """Mutable per-asset working state; lives on one worker thread."""

    asset_id: str
    events: list[StageEvent] = field(default_factory=list)

    def record(self, fingerprint: str, stage: str, status: str, notes: tuple[str, ...] = ()):
        self.events.append(StageEvent(stage, status, fingerprint, notes, timestamp=_now()))


def _is_terminal(events: tuple[StageEvent, ...], manifest_exists: bool) -> bool:
    if manifest_exists:
        return True
    return any(e.status in ("filtered", "error") for e in events)


def process_asset(
    store: AssetStore, config: PipelineConfig, client: AnnotationClient, asset_id: str
) -> tuple[StageEvent, ...]:
    """Run every stage for one asset, persisting artifacts as they land.

    Returns the recorded events. Annotation or geometry failures mark
    the asset errored and the batch moves on; only store-level write
    failures propagate.
    """
    fp = config.fingerprint()
    asset_fp = _asset_fingerprint(fp, store.source_mesh_path(asset_id))
    run = _AssetRun(asset_id)
    stage = "load"
    try:
        mesh = load_mesh(store.source_mesh_path(asset_id).read_bytes())
        run.record(fp, "load", "ok", (f"vertices={len(mesh.vertices)}", f"faces={len(mesh.faces)}"))

        stage = "rescale"
        target = _rescale_target(config, client, asset_id)
        if target is not None:
            mesh, scale = rescale_to_dims(mesh, target)
            run.record(fp, "rescale", "ok", (f"target={target!r}", f"scale={scale!r}"))
        else:
            run.record(fp, "rescale", "ok", ("target=none",))
        store.save_mesh(asset_id, mesh)

        stage = "render"
        views = render_views(mesh, n_views=config.n_renders, width=config.render_size, height=config.render_size)
        store.save_renders(asset_id, views)
        run.record(fp, "render", "ok", (f"views={len(views)}",))

        stage = "gate"
        gate = client.quality_gate(asset_id, mesh, views)
        gate.validate()
        if not gate.passed:
            run.record(fp, "gate", "filtered", gate.reasons)
            store.save_stage_log(asset_id, asset_fp, run.events)
            return tuple(run.events)
        run.record(fp, "gate", "ok")

        stage = "properties"
        estimate = client.estimate_properties(asset_id, mesh, views)
        estimate.properties.validate()
        run.record(fp, "properties", "ok", estimate.notes)

        stage = "caption"
        caption = client.caption(asset_id, mesh, views)
        caption.validate()
        run.record(fp, "caption", "ok")

        stage = "sample"
        cloud = surface_sample(mesh, config.surface_samples, seed=stage_seed(config.seed, asset_id, "sample"))
        run.record(fp, "sample", "ok", (f"points={len(cloud.points)}",))

        stage = "fps"
        fps_index = farthest_point_sampling(cloud, config.fps_candidates, default_fps_seed(cloud))
        candidate_cloud = PointCloud(
            points=cloud.points[fps_index],
            normals=None if cloud.normals is None else cloud.normals[fps_index],
        )
        run.record(fp, "fps", "ok", (f"candidates={len(fps_index)}",))

        stage = "select_points"
        selection = client.select_points(asset_id, candidate_cloud, views)
        selection.validate(candidate_count=len(candidate_cloud.points))
        run.record(
            fp,
            "select_points",
            "ok",
            (f"functional={len(selection.functional_points)}", f"grasp={len(selection.grasp_points)}"),
        )

        stage = "propose"
        proposals = client.propose_grasps(
            asset_id,
            cloud,
            config.gripper,
            max_n=config.max_proposals,
            seed=stage_seed(config.seed, asset_id, "propose"),
        )
        run.record(fp, "propose", "ok", (f"proposals={len(proposals)}",))

        stage = "proximity"
        anchors = [p.position for p in selection.functional_points] + [
            p.position for p in selection.grasp_points
        ]
        kept = proximity_filter(proposals, anchors, threshold=config.proximity_threshold)
        run.record(fp, "proximity", "ok", (f"kept={len(kept)}",))

        stage = "fps7"
        candidates = fps_7dof(kept, config.grasp_fps_k)
        run.record(fp, "fps7", "ok", (f"candidates={len(candidates)}",))

        stage = "associate"
        candidates = associate_semantics(candidates, selection.functional_points, selection.grasp_points)
        run.record(fp, "associate", "ok")

        stage = "verify"
        judged = tuple(
            replace(
                grasp,
                verification=verify_grasp(
                    mesh,
                    estimate.properties,
                    grasp,
                    config.gripper,
                    displacement_threshold=config.displacement_threshold,
                    test_acceleration=config.test_acceleration,
                ),
            )
            for grasp in candidates
        )
        verified = tuple(g for g in judged if g.verification.passed)
        store.save_candidates(asset_id, len(proposals), judged)
        run.record(fp, "verify", "ok", (f"candidates={len(judged)}", f"verified={len(verified)}"))

        stage = "placement"
        placement = make_placement(mesh)
        run.record(fp, "placement", "ok", (f"collision_radius={placement.collision_radius!r}",))

        stage = "consolidate"
        provenance = tuple(replace(e, timestamp=None) for e in run.events) + (
            StageEvent("consolidate", "ok", fp),
        )
        record = AssetRecord(
            asset_id=asset_id,
            mesh_ref="mesh.obj",
            physical=estimate.properties,
            caption=caption,
            functional_points=selection.functional_points,
            grasp_points=selection.grasp_points,
            verified_grasps=verified,
            placement=placement,
            provenance=provenance,
        )
        record.validate()
        store.save_manifest(asset_id, record)
        run.record(fp, "consolidate", "ok")
    except Exception as exc:
        notes = (f"{type(exc).__name__}: {exc}",) + tuple(
            line.rstrip() for line in traceback.format_exc().splitlines()[-2:-1]
        )
        run.record(fp, stage, "error", notes)
    store.save_stage_log(asset_id, asset_fp, run.events)
    return tuple(run.events)


@dataclass(frozen=True)
class RunResult:
    stats: PipelineStats
    executed: tuple[str, ...]
    skipped: tuple[str, ...]
    stage_executions: int = 0


def _asset_fingerprint(config_fp: str, source_path: Path) -> str:
    """Config hash extended with the source mesh content hash, so a
    changed mesh under a reused id never skips as complete."""
    try:
        content = hashlib.sha256(source_path.read_bytes()).hexdigest()[:12]
    except OSError:
        content = "unreadable"
    return f"{config_fp}:{content}"


def run_pipeline(config: PipelineConfig) -> RunResult:
    store = AssetStore(config.store_dir)
    client = build_client(config)
    if config.input_dir is not None:
        asset_ids = ingest_assets(store, config.input_dir)
    else:
        asset_ids = [a for a in store.list_assets() if store.source_mesh_path(a).is_file()]
    config_fp = config.fingerprint()

    to_run: list[str] = []
    skipped: list[str] = []
    for asset_id in asset_ids:
        if store.has_stage_log(asset_id):
            old_fp, events = store.load_stage_log(asset_id)
            current = _asset_fingerprint(config_fp, store.source_mesh_path(asset_id))
            if old_fp == current and _is_terminal(events, store.has_manifest(asset_id)):
                skipped.append(asset_id)
                continue
        to_run.append(asset_id)

    executed_events = 0
    if to_run:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            for events in pool.map(
                lambda aid: process_asset(store, config, client, aid), to_run
            ):
                executed_events += len(events)

    close = getattr(client, "close", None)
    if close is not None:
        close()
    stats = compute_stats(store)
    return RunResult(
        stats=stats, executed=tuple(to_run), skipped=tuple(skipped), stage_executions=executed_events
    )


def compute_stats(store: AssetStore) -> PipelineStats:
    """Aggregate counters by scanning the store; nothing cached.

    Every rate the stats expose is a quotient of these counts, so any
    number reported upstream can be reproduced from the persisted tree.
    An asset whose manifest claims more verified grasps than its
    candidate file holds fails the integrity check.
    """
    ingested = gate_passed = annotated = errored = 0
    proposals_raw = candidates = verified = 0
    for asset_id in store.list_assets():
        if not store.has_stage_log(asset_id):
            continue
        _, events = store.load_stage_log(asset_id)
        ingested += 1
        if any(e.stage == "gate" and e.status == "ok" for e in events):
            gate_passed += 1
        if any(e.status == "error" for e in events):
            errored += 1
        has_manifest = store.has_manifest(asset_id)
        if has_manifest:
            annotated += 1
            record = store.load_manifest(asset_id)
            n_verified = len(record.verified_grasps)
            if store.candidates_path(asset_id).is_file():
                raw, judged = store.load_candidates(asset_id)
                proposals_raw += raw
                candidates += len(judged)
                if n_verified > len(judged):
                    raise StatsIntegrityError(
                        f"{asset_id}: {n_verified} verified grasps but only {len(judged)} candidates"
                    )
            elif n_verified:
                raise StatsIntegrityError(f"{asset_id}: verified grasps without a candidate record")
            verified += n_verified
    stats = PipelineStats(
        ingested=ingested,
        gate_passed=gate_passed,
        annotated=annotated,
        errored=errored,
        proposals_raw=proposals_raw,
        candidates=candidates,
        verified=verified,
    )
    stats.validate()
    return stats


def verify_stored_asset(
    store: AssetStore, asset_id: str, config: PipelineConfig | None = None
) -> list[dict]:
    """Re-judge an asset's stored candidates against its stored mesh.

    A read-only audit for the CLI: returns one row per candidate with
    the fresh outcome so drift between manifest and mesh shows up.
    """
    gripper = config.gripper if config else DEFAULT_GRIPPER
    displacement = config.displacement_threshold if config else DISPLACEMENT_THRESHOLD
    acceleration = config.test_acceleration if config else TEST_ACCELERATION
    mesh = store.load_mesh(asset_id)
    record = store.load_manifest(asset_id)
    _, judged = store.load_candidates(asset_id)
    rows = []
    for index, grasp in enumerate(judged):
        outcome = verify_grasp(
            mesh,
            record.physical,
            grasp,
            gripper,
            displacement_threshold=displacement,
            test_acceleration=acceleration,
        )
        rows.append(
            {
                "index": index,
                "passed": outcome.passed,
                "failure_reason": outcome.failure_reason,
                "stored_reason": grasp.verification.failure_reason if grasp.verification else None,
                "matches_stored": (
                    grasp.verification is not None and outcome == grasp.verification
                ),
            }
        )
    return rows
