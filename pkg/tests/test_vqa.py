"""Question/answer synthesis over scene layouts.

The core check is groundedness: every emitted pair's grounding block is
re-derived here from the layout and asset records with plain
arithmetic, and the answer string must re-render from that grounding
verbatim. A pair that mentions anything not recomputable fails.
"""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest

from assetforge.layout import SceneLayout, ScenePlacement, TableRect, sample_layout
from assetforge.model import PlacementAnnotation
from assetforge.vqa import (
    SLIDE_PALETTE,
    VQA_CATEGORIES,
    dumps_vqa,
    front_viewpoint,
    generate_vqa,
    loads_vqa,
    nearest_neighbor_gap,
    occluding_asset,
    render_answer,
    segment_point_distance,
    sweep_colliders,
)
from conftest import make_record

TOL = 1e-9


def scene_records(rng, n, radius=0.06):
    records = []
    for i in range(n):
        base = make_record(rng, f"obj-{i}")
        placement = PlacementAnnotation(
            position=base.placement.position,
            orientation=base.placement.orientation,
            collision_radius=radius,
        )
        records.append(replace(base, placement=placement))
    return records


def recompute_and_check(pair, layout, records_by_id):
    """Independent fact check; raises AssertionError with the offending
    field. Returns normally only for a fully grounded pair."""
    g = pair.grounding
    ids = {p.asset_id for p in layout.placements}
    for asset_id in g["asset_ids"]:
        assert asset_id in ids, f"{asset_id} not in scene"
    index_of = {p.asset_id: i for i, p in enumerate(layout.placements)}
    radii = {
        p.asset_id: records_by_id[p.asset_id].placement.collision_radius
        for p in layout.placements
    }

    if pair.category == "language_grounding":
        asset_id = g["asset_ids"][0]
        record = records_by_id[asset_id]
        placement = layout.placements[index_of[asset_id]]
        assert g["category"] == record.caption.category
        assert g["color"] == record.caption.color
        assert abs(g["position_2d"][0] - placement.position_2d[0]) < TOL
        assert abs(g["position_2d"][1] - placement.position_2d[1]) < TOL
        point = next(p for p in record.grasp_points if p.id == g["grasp_point_id"])
        assert g["grasp_type"] == point.grasp_type

    elif pair.category == "functional_planning":
        asset_id = g["asset_ids"][0]
        record = records_by_id[asset_id]
        point = next(p for p in record.functional_points if p.id == g["functional_point_id"])
        assert g["function_label"] == point.function_label
        assert all(abs(a - b) < TOL for a, b in zip(g["point_position"], point.position))
        blocker = occluding_asset(layout, radii, index_of[asset_id])
        assert g["blocker_id"] == blocker

    elif pair.category == "scene_understanding":
        asset_id = g["asset_ids"][0]
        target = index_of[asset_id]
        neighbor = nearest_neighbor_gap(layout, radii, target)
        assert neighbor is not None
        neighbor_id, center_distance, gap = neighbor
        assert g["neighbor_id"] == neighbor_id
        assert abs(g["center_distance"] - center_distance) < TOL
        assert abs(g["gap"] - gap) < TOL
        # re-derive the distance by hand too
        a = layout.placements[target].position_2d
        b = layout.placements[index_of[neighbor_id]].position_2d
        d = math.hypot(a[0] - b[0], a[1] - b[1])
        assert abs(g["center_distance"] - d) < TOL
        assert abs(g["gap"] - (d - radii[asset_id] - radii[neighbor_id])) < TOL

    elif pair.category == "task_planning":
        asset_id = g["asset_ids"][0]
        dx, dy = g["displacement"]
        assert dx in SLIDE_PALETTE and dy in SLIDE_PALETTE
        colliders = sweep_colliders(layout, radii, index_of[asset_id], dx, dy)
        assert list(g["colliders"]) == colliders
        assert g["risk"] == bool(colliders)

    elif pair.category == "detection":
        kind, value = g["attribute_kind"], g["attribute_value"]
        matches = [
            p.asset_id
            for p in layout.placements
            if getattr(records_by_id[p.asset_id].caption, kind) == value
        ]
        assert g["count"] == len(matches)
        assert sorted(g["asset_ids"]) == sorted(matches)

    else:
        raise AssertionError(f"unknown category {pair.category}")

    assert pair.answer == render_answer(pair.category, g)


class TestGeometryHelpers:
    def test_segment_point_distance(self):
        assert segment_point_distance((0, 0), (2, 0), (1, 1)) == pytest.approx(1.0)
        assert segment_point_distance((0, 0), (2, 0), (3, 0)) == pytest.approx(1.0)
        assert segment_point_distance((0, 0), (0, 0), (3, 4)) == pytest.approx(5.0)

    def test_front_viewpoint_is_ahead_of_table(self):
        layout = SceneLayout(
            scene_id="s",
            table=TableRect.from_size(1.0, 0.8),
            placements=(),
        )
        x, y = front_viewpoint(layout)
        assert x == pytest.approx(0.5)
        assert y == pytest.approx(-0.5)

    def test_occlusion_strictness(self):
        table = TableRect.from_size(1.0, 1.0)
        placements = (
            ScenePlacement(asset_id="front", position_2d=(0.5, 0.25), yaw=0.0),
            ScenePlacement(asset_id="back", position_2d=(0.5, 0.75), yaw=0.0),
        )
        layout = SceneLayout(scene_id="s", table=table, placements=placements)
        radii = {"front": 0.1, "back": 0.1}
        # sightline to "back" passes straight through "front"
        assert occluding_asset(layout, radii, 1) == "front"
        # nothing sits between the viewpoint and "front"
        assert occluding_asset(layout, radii, 0) is None

    def test_sweep_example_from_construction(self):
        """A at (0.3, 0.3) sliding +0.10 x then +0.05 y grazes B at
        (0.42, 0.33): center gap along the first leg dips under r_a + r_b."""
        table = TableRect.from_size(1.0, 1.0)
        placements = (
            ScenePlacement(asset_id="A", position_2d=(0.3, 0.3), yaw=0.0),
            ScenePlacement(asset_id="B", position_2d=(0.42, 0.33), yaw=0.0),
        )
        layout = SceneLayout(scene_id="s", table=table, placements=placements)
        radii = {"A": 0.05, "B": 0.05}
        assert sweep_colliders(layout, radii, 0, 0.10, 0.05) == ["B"]
        # moving away is clear
        assert sweep_colliders(layout, radii, 0, -0.10, -0.05) == []


class TestGeneration:
    def build(self, seed=3, n=5, per_category=2):
        rng = np.random.default_rng(seed)
        records = scene_records(rng, n)
        layout = sample_layout(records, TableRect.from_size(1.0, 1.0), rng_seed=seed)
        pairs = generate_vqa(layout, records, per_category=per_category, rng_seed=seed)
        return layout, records, pairs

    def test_all_pairs_grounded(self):
        layout, records, pairs = self.build()
        by_id = {r.asset_id: r for r in records}
        assert pairs, "expected at least one pair"
        for pair in pairs:
            recompute_and_check(pair, layout, by_id)

    def test_category_order_and_counts(self):
        layout, records, pairs = self.build(per_category=1)
        cats = [p.category for p in pairs]
        assert cats == sorted(cats, key=VQA_CATEGORIES.index)
        for cat in set(cats):
            assert cats.count(cat) <= 1

    def test_deterministic(self):
        _, _, a = self.build(seed=8)
        _, _, b = self.build(seed=8)
        assert a == b

    def test_empty_layout(self):
        layout = SceneLayout(scene_id="empty", table=TableRect.from_size(1, 1), placements=())
        assert generate_vqa(layout, [], per_category=3, rng_seed=0) == []

    def test_negative_per_category(self):
        layout, records, _ = self.build()
        with pytest.raises(ValueError):
            generate_vqa(layout, records, per_category=-1, rng_seed=0)

    def test_unknown_asset_in_layout(self):
        rng = np.random.default_rng(1)
        records = scene_records(rng, 2)
        layout = sample_layout(records, TableRect.from_size(1, 1), rng_seed=1)
        with pytest.raises(KeyError):
            generate_vqa(layout, records[:1], per_category=1, rng_seed=0)

    def test_questions_name_scene_coordinates(self):
        layout, records, pairs = self.build()
        pos = {
            p.asset_id: p.position_2d for p in layout.placements
        }
        for pair in pairs:
            if pair.category in ("language_grounding", "functional_planning",
                                  "scene_understanding", "task_planning"):
                asset_id = pair.grounding["asset_ids"][0]
                x, y = pos[asset_id]
                assert f"({x:.2f}, {y:.2f})" in pair.question

    def test_serialization_roundtrip(self):
        _, _, pairs = self.build()
        assert loads_vqa(dumps_vqa(pairs)) == pairs

    def test_many_seeds_stay_grounded(self):
        for seed in range(12):
            layout, records, pairs = self.build(seed=seed, n=4, per_category=2)
            by_id = {r.asset_id: r for r in records}
            for pair in pairs:
                recompute_and_check(pair, layout, by_id)
