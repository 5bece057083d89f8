#!/usr/bin/env python3
"""Recount pipeline statistics straight from the files in a store.

Independent of the library's own aggregation: walks the store tree,
parses stage logs and manifests with the json module only, and prints
both counts so drift between the two code paths is visible.

Usage:
    python3 scripts/recount_stats.py --store /path/to/store
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path


def recount(store_dir: Path) -> dict:
    counts = {
        "ingested": 0,
        "gate_passed": 0,
        "annotated": 0,
        "errored": 0,
        "proposals_raw": 0,
        "candidates": 0,
        "verified": 0,
    }
    assets_root = store_dir / "assets"
    for asset_dir in sorted(p for p in assets_root.iterdir() if p.is_dir()):
        log_path = asset_dir / "stage_log.json"
        if not log_path.is_file():
            continue
        counts["ingested"] += 1
        log = json.loads(log_path.read_text())
        events = log["events"]
        statuses = {e["stage"]: e["status"] for e in events}
        if statuses.get("gate") == "ok":
            counts["gate_passed"] += 1
        if any(e["status"] == "error" for e in events):
            counts["errored"] += 1
        manifest_path = asset_dir / "manifest.json"
        if manifest_path.is_file():
            counts["annotated"] += 1
            manifest = json.loads(manifest_path.read_text())
            counts["verified"] += len(manifest.get("verified_grasps", []))
        candidates_path = asset_dir / "candidates.json"
        if candidates_path.is_file():
            blob = json.loads(candidates_path.read_text())
            counts["proposals_raw"] += blob["proposals_raw"]
            counts["candidates"] += len(blob["candidates"])
    return counts


def rates(counts: dict) -> dict:
    def ratio(a: float, b: float):
        return None if b == 0 else a / b

    return {
        "gate_pass_rate": ratio(counts["gate_passed"], counts["ingested"]),
        "verification_success_rate": ratio(counts["verified"], counts["candidates"]),
        "avg_proposals_per_object": ratio(counts["proposals_raw"], counts["annotated"]),
        "avg_candidates_per_object": ratio(counts["candidates"], counts["annotated"]),
        "avg_verified_per_object": ratio(counts["verified"], counts["annotated"]),
    }


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--store", required=True)
    parser.add_argument("--compare", action="store_true",
                        help="also run the library aggregation and diff")
    args = parser.parse_args(argv)
    store_dir = Path(args.store)
    counts = recount(store_dir)
    out = {"counts": counts, "rates": rates(counts)}
    print(json.dumps(out, indent=2))

    if args.compare:
        sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))
        from assetforge.pipeline import compute_stats
        from assetforge.store import AssetStore

        lib = compute_stats(AssetStore(store_dir)).to_dict()
        same = lib == out
        print(f"library aggregation matches: {same}", file=sys.stderr)
        if not same:
            print(json.dumps(lib, indent=2), file=sys.stderr)
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
