"""Command-line entry points.

One subcommand per workflow step: ingest meshes, run the annotation
pipeline, re-check stored grasps, sample tabletop layouts, generate
question/answer pairs, print store statistics, and serve the review
API. Everything operates on a store directory so steps can run on
different machines at different times.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .layout import TableRect, sample_layout, validate_layout
from .pipeline import PipelineConfig, compute_stats, ingest_assets, run_pipeline, verify_stored_asset
from .store import AssetStore
from .vqa import dumps_vqa, generate_vqa

REMOTE_URL_ENV = "ASSETFORGE_REMOTE_URL"


def _add_store(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--store", required=True, help="asset store directory")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="assetforge")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="copy input meshes into the store")
    p.add_argument("--input", required=True, help="directory of .obj files")
    _add_store(p)

    p = sub.add_parser("run", help="annotate every ingested asset")
    p.add_argument("--input", default=None, help="directory of .obj files (omit to reuse the store)")
    _add_store(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--clients", choices=("mock", "remote"), default="mock")
    p.add_argument("--remote-url", default=os.environ.get(REMOTE_URL_ENV))
    p.add_argument("--timeout", type=float, default=30.0, help="remote request timeout, seconds")
    p.add_argument("--samples", type=int, default=None, help="surface sample count")
    p.add_argument("--fps-k", type=int, default=None, help="candidate point count")
    p.add_argument("--grasp-k", type=int, default=None, help="grasps kept by pose-space thinning")
    p.add_argument("--max-proposals", type=int, default=None)
    p.add_argument("--proximity-threshold", type=float, default=None, help="metres")
    p.add_argument("--renders", type=int, default=None)
    p.add_argument("--render-size", type=int, default=None)
    p.add_argument("--target-size", type=float, default=None, help="rescale longest axis to this, metres")
    p.add_argument("--displacement-threshold", type=float, default=None, help="metres")
    p.add_argument("--workers", type=int, default=4)

    p = sub.add_parser("verify", help="re-run grasp verification on a stored asset")
    _add_store(p)
    p.add_argument("--asset", required=True, help="asset id")

    p = sub.add_parser("layout", help="sample a collision-free tabletop layout")
    _add_store(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--table-size", type=float, nargs=2, default=(1.0, 1.0), metavar=("W", "D"))
    p.add_argument("--num-objects", type=int, default=5)
    p.add_argument("--assets", nargs="*", default=None, help="explicit asset ids (overrides sampling)")
    p.add_argument("--scenes", type=int, default=1, help="number of layouts to sample")
    p.add_argument("--out", default=None, help="output path (single scene only)")

    p = sub.add_parser("vqa", help="generate grounded question/answer pairs for a layout")
    _add_store(p)
    p.add_argument("--layout", required=True, help="layout JSON path or scene id in the store")
    p.add_argument("--per-category", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)

    p = sub.add_parser("stats", help="print pipeline statistics for a store")
    _add_store(p)

    p = sub.add_parser("serve", help="run the review API")
    _add_store(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8008)
    p.add_argument("--review-sample-rate", type=float, default=None,
                   help="restrict the pending queue to this fraction of assets")

    return parser


def _cmd_ingest(args) -> int:
    store = AssetStore(args.store)
    ids = ingest_assets(store, Path(args.input))
    for asset_id in ids:
        print(asset_id)
    print(f"ingested {len(ids)} assets into {store.root}", file=sys.stderr)
    return 0


def _run_config(args) -> PipelineConfig:
    config = PipelineConfig(
        input_dir=args.input,
        store_dir=args.store,
        client_mode=args.clients,
        remote_base_url=args.remote_url,
        seed=args.seed,
        workers=args.workers,
    )
    overrides = {
        "surface_samples": args.samples,
        "fps_candidates": args.fps_k,
        "grasp_fps_k": args.grasp_k,
        "max_proposals": args.max_proposals,
        "proximity_threshold": args.proximity_threshold,
        "n_renders": args.renders,
        "render_size": args.render_size,
        "target_longest_axis": args.target_size,
        "displacement_threshold": args.displacement_threshold,
        "remote_timeout": args.timeout,
    }
    return replace(config, **{k: v for k, v in overrides.items() if v is not None})


def _cmd_run(args) -> int:
    if args.clients == "remote" and not args.remote_url:
        print(f"error: --clients remote needs --remote-url or ${REMOTE_URL_ENV}", file=sys.stderr)
        return 2
    result = run_pipeline(_run_config(args))
    print(json.dumps(result.stats.to_dict(), indent=2))
    print(
        f"executed {len(result.executed)}, skipped {len(result.skipped)} (already complete)",
        file=sys.stderr,
    )
    return 0


def _cmd_verify(args) -> int:
    store = AssetStore(args.store)
    rows = verify_stored_asset(store, args.asset)
    mismatches = 0
    for row in rows:
        mark = "ok" if row["matches_stored"] else "MISMATCH"
        outcome = "pass" if row["passed"] else row["failure_reason"]
        print(f"{row['index']:4d}  {outcome:<24} {mark}")
        mismatches += not row["matches_stored"]
    verified = sum(1 for r in rows if r["passed"])
    print(f"{verified}/{len(rows)} grasps verified, {mismatches} mismatches", file=sys.stderr)
    return 1 if mismatches else 0


def _cmd_layout(args) -> int:
    store = AssetStore(args.store)
    annotated = store.list_annotated()
    if not annotated:
        print("error: store has no annotated assets", file=sys.stderr)
        return 2
    if args.out and args.scenes != 1:
        print("error: --out only makes sense with a single scene", file=sys.stderr)
        return 2
    table = TableRect.from_size(args.table_size[0], args.table_size[1])
    rng = np.random.default_rng(args.seed)
    for index in range(args.scenes):
        if args.assets:
            chosen = list(args.assets)
            selection = {"mode": "explicit"}
        else:
            n = min(args.num_objects, len(annotated))
            picks = rng.choice(len(annotated), size=n, replace=False)
            chosen = [annotated[i] for i in sorted(picks)]
            selection = {"mode": "uniform", "pool_size": len(annotated)}
        records = [store.load_manifest(a) for a in chosen]
        scene_seed = args.seed + index
        layout = sample_layout(records, table, rng_seed=scene_seed)
        layout = replace(layout, extra={**layout.extra, "asset_selection": selection})
        violations = validate_layout(layout, records)
        if violations:  # sampler guarantees this never fires; belt and braces
            print(f"error: sampled layout failed validation: {violations[0]}", file=sys.stderr)
            return 1
        out = Path(args.out) if args.out else store.layouts_root / f"{layout.scene_id}.json"
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(layout.dumps())
        print(out)
    return 0


def _load_layout(store: AssetStore, ref: str):
    from .layout import SceneLayout

    path = Path(ref)
    if not path.is_file():
        path = store.layouts_root / f"{ref}.json"
    if not path.is_file():
        raise FileNotFoundError(f"no layout file or scene id {ref!r}")
    return SceneLayout.loads(path.read_text())


def _cmd_vqa(args) -> int:
    store = AssetStore(args.store)
    try:
        layout = _load_layout(store, args.layout)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    records = [store.load_manifest(p.asset_id) for p in layout.placements]
    pairs = generate_vqa(layout, records, per_category=args.per_category, rng_seed=args.seed)
    out = Path(args.out) if args.out else store.vqa_root / f"{layout.scene_id}.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(dumps_vqa(pairs))
    print(out)
    print(f"{len(pairs)} pairs for scene {layout.scene_id}", file=sys.stderr)
    return 0


def _cmd_stats(args) -> int:
    stats = compute_stats(AssetStore(args.store))
    print(json.dumps(stats.to_dict(), indent=2))
    return 0


def _cmd_serve(args) -> int:
    from .review import serve

    serve(args.store, host=args.host, port=args.port, review_sample_rate=args.review_sample_rate)
    return 0


_COMMANDS = {
    "ingest": _cmd_ingest,
    "run": _cmd_run,
    "verify": _cmd_verify,
    "layout": _cmd_layout,
    "vqa": _cmd_vqa,
    "stats": _cmd_stats,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    return _COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
