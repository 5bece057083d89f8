#!/usr/bin/env python3
"""Build a review fixture store: 20 annotated primitive assets plus a
synthetic verdict history with known per-dimension accuracies.

The verdict counts are tuned so the aggregate endpoint displays
100.0 / 99.6 / 92.2 / 92.2 / 84.8 percent across the five dimensions
to one decimal. Default mode seeds all 500 verdicts (25 reviewers x
20 assets) and the numbers are exact. With --holdout-asset the last
asset gets no verdicts at all, leaving it in the pending queue for a
UI test to review; the wrong counts are rescaled so the 475 seeded
verdicts still display the same five figures.

Usage:
    python3 scripts/seed_review_fixture.py --store /tmp/review-store [--holdout-asset]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from assetforge.geometry import write_obj
from assetforge.model import REVIEW_DIMENSIONS, ReviewVerdict
from assetforge.pipeline import PipelineConfig, run_pipeline
from assetforge.primitives import box_mesh, cylinder_mesh, diamond_prism_mesh, icosphere_mesh, lshape_mesh
from assetforge.store import AssetStore

N_ASSETS = 20
N_REVIEWERS = 25

# incorrect counts per dimension, full mode (500 verdicts, exact):
# 0, 2, 39, 39, 76 wrong -> 100.0, 99.6, 92.2, 92.2, 84.8 percent correct
WRONG_FULL = {
    "category_classification": 0,
    "language_descriptions": 2,
    "functional_point_labels": 39,
    "physical_property_estimation": 39,
    "grasp_point_selection": 76,
}
# holdout mode (475 verdicts): same five figures after one-decimal rounding
WRONG_HOLDOUT = {
    "category_classification": 0,
    "language_descriptions": 2,
    "functional_point_labels": 37,
    "physical_property_estimation": 37,
    "grasp_point_selection": 72,
}


def build_corpus(input_dir: Path) -> None:
    input_dir.mkdir(parents=True, exist_ok=True)
    makers = [
        lambda i: box_mesh(0.3 + 0.01 * i, 0.2, 0.1),
        lambda i: cylinder_mesh(0.04 + 0.002 * i, 0.15),
        lambda i: icosphere_mesh(0.05 + 0.003 * i),
        lambda i: diamond_prism_mesh(0.03, 0.08 + 0.005 * i, center=(0, 0, 0.03)),
        lambda i: lshape_mesh(0.2 + 0.01 * i, 0.06, 0.08),
    ]
    for i in range(N_ASSETS):
        mesh = makers[i % len(makers)](i // len(makers))
        (input_dir / f"fixture-{i:02d}.obj").write_bytes(write_obj(mesh))


def verdict_for(index: int, asset_id: str, reviewer_id: str, wrong: dict[str, int]) -> ReviewVerdict:
    """Verdict number ``index`` in submission order; wrong ratings are
    packed into the low indices, far from the held-out tail."""
    ratings = {
        dim: ("incorrect" if index < wrong[dim] else "correct") for dim in REVIEW_DIMENSIONS
    }
    any_wrong = any(r == "incorrect" for r in ratings.values())
    return ReviewVerdict(
        asset_id=asset_id,
        reviewer_id=reviewer_id,
        ratings=ratings,
        overall="reject" if any_wrong else "accept",
        timestamp=f"2026-08-01T00:{index // 60:02d}:{index % 60:02d}+00:00",
    )


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--store", required=True)
    parser.add_argument("--holdout-asset", action="store_true",
                        help="leave the last asset unreviewed (pending) for UI tests")
    parser.add_argument("--seed", type=int, default=20)
    args = parser.parse_args(argv)

    store_dir = Path(args.store)
    input_dir = store_dir.parent / f"{store_dir.name}-input"
    build_corpus(input_dir)
    config = PipelineConfig(
        input_dir=str(input_dir),
        store_dir=str(store_dir),
        seed=args.seed,
        surface_samples=2000,
        max_proposals=300,
        n_renders=2,
        render_size=96,
        target_longest_axis=0.06,
        workers=4,
    )
    result = run_pipeline(config)
    print(f"pipeline: {len(result.executed)} executed, "
          f"{result.stats.annotated} annotated", file=sys.stderr)

    store = AssetStore(store_dir)
    assets = store.list_annotated()
    if len(assets) != N_ASSETS:
        print(f"error: expected {N_ASSETS} annotated assets, got {len(assets)}", file=sys.stderr)
        return 1

    wrong = WRONG_HOLDOUT if args.holdout_asset else WRONG_FULL
    reviewed = assets[:-1] if args.holdout_asset else assets
    if args.holdout_asset:
        print(f"held out: {assets[-1]} stays pending", file=sys.stderr)
    submitted = 0
    for slot, asset_id in enumerate(reviewed):
        for reviewer in range(N_REVIEWERS):
            index = slot * N_REVIEWERS + reviewer
            store.append_verdict(asset_id, verdict_for(index, asset_id, f"reviewer-{reviewer:02d}", wrong))
            submitted += 1
    print(f"seeded {submitted} verdicts over {len(reviewed)} assets", file=sys.stderr)

    from assetforge.review import accuracy_report

    report = accuracy_report(store)
    for dim in REVIEW_DIMENSIONS:
        entry = report["dimensions"][dim]
        pct = entry["accuracy_pct"]
        print(f"{dim:32s} {entry['correct']:3d}/{entry['total']} = {pct:.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
