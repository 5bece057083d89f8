#!/usr/bin/env python3
"""End-to-end tour on a small primitive corpus.

Generates a handful of meshes, runs the full mock-mode pipeline,
samples a tabletop layout, emits question/answer pairs, and prints
where everything landed. Handy as a smoke test and as a template for
wiring the steps together in code.

Usage:
    python3 scripts/run_demo.py [--workdir /tmp/assetforge-demo] [--seed 7]
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from assetforge.geometry import write_obj
from assetforge.layout import TableRect, sample_layout, validate_layout
from assetforge.pipeline import PipelineConfig, run_pipeline
from assetforge.primitives import box_mesh, cylinder_mesh, icosphere_mesh, lshape_mesh
from assetforge.store import AssetStore
from assetforge.vqa import dumps_vqa, generate_vqa


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workdir", default="/tmp/assetforge-demo")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args(argv)

    workdir = Path(args.workdir)
    input_dir = workdir / "meshes"
    input_dir.mkdir(parents=True, exist_ok=True)
    corpus = {
        "crate": box_mesh(0.3, 0.25, 0.15),
        "can": cylinder_mesh(0.035, 0.12),
        "ball": icosphere_mesh(0.05),
        "bracket": lshape_mesh(0.2, 0.05, 0.08),
        "bar": box_mesh(0.4, 0.05, 0.05),
    }
    for name, mesh in corpus.items():
        (input_dir / f"{name}.obj").write_bytes(write_obj(mesh))

    config = PipelineConfig(
        input_dir=str(input_dir),
        store_dir=str(workdir / "store"),
        seed=args.seed,
        surface_samples=4000,
        max_proposals=500,
        n_renders=4,
        render_size=128,
        target_longest_axis=0.06,
    )
    result = run_pipeline(config)
    print(json.dumps(result.stats.to_dict(), indent=2))

    store = AssetStore(workdir / "store")
    records = [store.load_manifest(a) for a in store.list_annotated()]
    layout = sample_layout(records, TableRect.from_size(1.0, 1.0), rng_seed=args.seed)
    violations = validate_layout(layout, records)
    print(f"\nlayout {layout.scene_id}: {len(layout.placements)} placements, "
          f"{len(violations)} violations")
    for p in layout.placements:
        print(f"  {p.asset_id:10s} at ({p.position_2d[0]:.3f}, {p.position_2d[1]:.3f}) "
              f"yaw {p.yaw:.2f}")
    layout_path = store.layouts_root / f"{layout.scene_id}.json"
    layout_path.write_text(layout.dumps())

    pairs = generate_vqa(layout, records, per_category=2, rng_seed=args.seed)
    vqa_path = store.vqa_root / f"{layout.scene_id}.json"
    vqa_path.write_text(dumps_vqa(pairs))
    print(f"\n{len(pairs)} question/answer pairs:")
    for pair in pairs:
        print(f"  [{pair.category}]")
        print(f"    Q: {pair.question}")
        print(f"    A: {pair.answer}")

    print(f"\nstore:  {store.root}")
    print(f"layout: {layout_path}")
    print(f"vqa:    {vqa_path}")
    print(f"review: python3 -m assetforge serve --store {store.root} --port 8008")
    return 0


if __name__ == "__main__":
    sys.exit(main())
