"""Shared fixtures: a primitive mesh corpus, a pipeline-populated store,
and a randomized-but-valid asset record factory."""

from __future__ import annotations

import numpy as np
import pytest

from assetforge.geometry import write_obj
from assetforge.model import (
    GRASP_TYPES,
    AssetRecord,
    FunctionalPoint,
    GraspPoint,
    GraspPose,
    PhysicalProperties,
    PlacementAnnotation,
    SemanticCaption,
    StageEvent,
    VerificationOutcome,
)
from assetforge.pipeline import PipelineConfig, run_pipeline
from assetforge.primitives import (
    box_mesh,
    cylinder_mesh,
    icosphere_mesh,
    lshape_mesh,
    merge_meshes,
)
from assetforge.store import AssetStore

_WORDS = ("mug", "plate", "bottle", "lamp", "hammer", "bowl", "box", "wrench")
_COLORS = ("red", "blue", "white", "black", "green")
_MATERIALS = ("plastic", "wood", "metal", "ceramic", "rubber")


def _unit_quat(rng: np.random.Generator) -> tuple[float, float, float, float]:
    q = rng.normal(size=4)
    q = q / np.linalg.norm(q)
    return tuple(float(v) for v in q)


def _vec3(rng: np.random.Generator, scale: float = 0.3) -> tuple[float, float, float]:
    return tuple(float(v) for v in rng.uniform(-scale, scale, size=3))


def make_record(rng: np.random.Generator, asset_id: str = "fixture") -> AssetRecord:
    """A structurally valid record with randomized contents, including
    optional fields sometimes absent and extra fields sometimes present."""
    n_func = int(rng.integers(0, 4))
    n_grasp_pts = int(rng.integers(0, 4))
    functional_points = tuple(
        FunctionalPoint(
            id=i,
            position=_vec3(rng),
            function_label=str(rng.choice(("top", "handle", "rim", "spout"))),
            confidence=float(rng.uniform(0, 1)),
            rationale=f"surface patch {i}",
        )
        for i in range(n_func)
    )
    grasp_points = tuple(
        GraspPoint(
            id=i,
            position=_vec3(rng),
            grasp_type=str(rng.choice(GRASP_TYPES)),
            use_scenario="general handling",
        )
        for i in range(n_grasp_pts)
    )
    n_grasps = int(rng.integers(0, 5))
    verified_grasps = tuple(
        GraspPose(
            position=_vec3(rng),
            orientation=_unit_quat(rng),
            confidence=float(rng.uniform(0, 1)),
            associated_functional_point=(
                int(rng.integers(0, n_func)) if n_func and rng.random() < 0.7 else None
            ),
            associated_grasp_point=(
                int(rng.integers(0, n_grasp_pts)) if n_grasp_pts and rng.random() < 0.7 else None
            ),
            verification=VerificationOutcome(
                passed=True, failure_reason="none", stable_frames=3, max_displacement=0.0
            ),
            extra={"note": "randomized"} if rng.random() < 0.3 else {},
        )
        for _ in range(n_grasps)
    )
    return AssetRecord(
        asset_id=asset_id,
        mesh_ref="mesh.obj",
        physical=PhysicalProperties(
            obb_dims=tuple(float(v) for v in rng.uniform(0.01, 0.5, size=3)),
            mass=float(rng.uniform(0.01, 5.0)),
            friction=float(rng.uniform(0.0, 1.5)),
        ),
        caption=SemanticCaption(
            category=str(rng.choice(_WORDS)),
            color=str(rng.choice(_COLORS)),
            material=str(rng.choice(_MATERIALS)),
            size="hand-sized",
            shape="compact",
            function="household object",
        ),
        functional_points=functional_points,
        grasp_points=grasp_points,
        verified_grasps=verified_grasps,
        placement=PlacementAnnotation(
            position=_vec3(rng, 0.05),
            orientation=_unit_quat(rng),
            collision_radius=float(rng.uniform(0.02, 0.3)),
        ),
        provenance=(
            StageEvent(stage="load", status="ok", params_hash="cafe0123"),
            StageEvent(stage="consolidate", status="ok", params_hash="cafe0123"),
        ),
        extra={"tag": int(rng.integers(0, 100))} if rng.random() < 0.5 else {},
    )


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory):
    """Six meshes: four annotatable, one gate-failing pair, one broken file."""
    path = tmp_path_factory.mktemp("corpus")
    (path / "box-a.obj").write_bytes(write_obj(box_mesh(0.3, 0.2, 0.1)))
    (path / "cyl-b.obj").write_bytes(write_obj(cylinder_mesh(0.04, 0.15)))
    (path / "ball-c.obj").write_bytes(write_obj(icosphere_mesh(0.07)))
    (path / "bracket-e.obj").write_bytes(write_obj(lshape_mesh(0.2, 0.05, 0.08)))
    pair = merge_meshes(
        box_mesh(0.05, 0.05, 0.05, center=(-0.2, 0, 0)),
        box_mesh(0.05, 0.05, 0.05, center=(0.2, 0, 0)),
    )
    (path / "pair-d.obj").write_bytes(write_obj(pair))
    (path / "broken-f.obj").write_text("v 0 0 zero\nf 1 2 3\n")
    return path


@pytest.fixture(scope="session")
def pipeline_config(corpus_dir, tmp_path_factory):
    store_dir = tmp_path_factory.mktemp("store")
    return PipelineConfig(
        input_dir=str(corpus_dir),
        store_dir=str(store_dir),
        seed=11,
        surface_samples=1500,
        max_proposals=200,
        n_renders=2,
        render_size=64,
        target_longest_axis=0.06,
        workers=2,
    )


@pytest.fixture(scope="session")
def populated(pipeline_config):
    """The corpus pipeline run once; (store, config, result)."""
    result = run_pipeline(pipeline_config)
    return AssetStore(pipeline_config.store_dir), pipeline_config, result


@pytest.fixture()
def fresh_store(tmp_path):
    return AssetStore(tmp_path / "store")
