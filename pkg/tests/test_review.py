"""HTTP contract of the review service: listings, detail, verdict
submission, accuracy aggregation, and queue subsampling."""

from __future__ import annotations

import hashlib
import shutil

import numpy as np
import pytest
from fastapi.testclient import TestClient

from assetforge.model import REVIEW_DIMENSIONS
from assetforge.pipeline import compute_stats
from assetforge.review import create_app
from assetforge.store import AssetStore
from conftest import make_record

ANNOTATED = ["ball-c", "box-a", "bracket-e", "cyl-b"]


def verdict_body(reviewer="r1", wrong=(), overall=None, **extra):
    ratings = {d: ("incorrect" if d in wrong else "correct") for d in REVIEW_DIMENSIONS}
    body = {
        "reviewer_id": reviewer,
        "ratings": ratings,
        "overall": overall or ("reject" if wrong else "accept"),
    }
    body.update(extra)
    return body


@pytest.fixture(scope="module")
def review_store(populated, tmp_path_factory):
    store, _, _ = populated
    root = tmp_path_factory.mktemp("review") / "store"
    shutil.copytree(store.root, root)
    return AssetStore(root)


@pytest.fixture(scope="module")
def client(review_store):
    return TestClient(create_app(review_store))


class TestListing:
    def test_pending_queue(self, client):
        data = client.get("/api/v1/assets").json()
        assert [r["asset_id"] for r in data["assets"]] == ANNOTATED
        assert data["total"] == 4
        row = data["assets"][0]
        assert row["pending"] is True
        assert row["verdict_count"] == 0
        assert row["stage_status"] == "ok"
        assert row["thumbnail_url"].endswith("/renders/0")

    def test_all_includes_failures(self, client):
        data = client.get("/api/v1/assets", params={"status": "all"}).json()
        by_id = {r["asset_id"]: r for r in data["assets"]}
        assert len(by_id) == 6
        assert by_id["pair-d"]["stage_status"] == "filtered"
        assert by_id["broken-f"]["stage_status"] == "error"

    def test_pagination(self, client):
        data = client.get(
            "/api/v1/assets", params={"status": "annotated", "page": 2, "page_size": 1}
        ).json()
        assert [r["asset_id"] for r in data["assets"]] == ["box-a"]
        assert (data["total"], data["total_pages"]) == (4, 4)

    def test_bad_parameters(self, client):
        assert client.get("/api/v1/assets", params={"status": "weird"}).status_code == 422
        assert client.get("/api/v1/assets", params={"page": 0}).status_code == 422
        assert client.get("/api/v1/assets", params={"page_size": 0}).status_code == 422
        assert client.get("/api/v1/assets", params={"page_size": 101}).status_code == 422


class TestDetail:
    def test_shape(self, client, review_store):
        data = client.get("/api/v1/assets/ball-c").json()
        assert data["asset_id"] == "ball-c"
        assert data["pending"] is True
        assert data["verdicts"] == []
        assert len(data["render_urls"]) == 2
        assert data["manifest"] == review_store.load_manifest("ball-c").to_dict()
        raw, judged = review_store.load_candidates("ball-c")
        assert data["proposals_raw"] == raw
        assert len(data["grasps"]) == len(judged)
        assert all("verification" in g for g in data["grasps"])

    def test_unknown_asset_404(self, client):
        assert client.get("/api/v1/assets/nope").status_code == 404

    def test_filtered_asset_has_no_detail_but_renders_serve(self, client):
        assert client.get("/api/v1/assets/pair-d").status_code == 404
        png = client.get("/api/v1/assets/pair-d/renders/0")
        assert png.status_code == 200
        assert png.content[:8] == b"\x89PNG\r\n\x1a\n"

    def test_render_index_bounds(self, client):
        assert client.get("/api/v1/assets/ball-c/renders/99").status_code == 404


class TestVerdicts:
    def test_submit_and_queue_shrinks(self, client):
        before = client.get("/api/v1/assets").json()["total"]
        resp = client.post("/api/v1/assets/cyl-b/verdicts", json=verdict_body("alice"))
        assert resp.status_code == 201
        assert resp.json()["status"] == "created"
        after = client.get("/api/v1/assets").json()
        assert after["total"] == before - 1
        assert "cyl-b" not in [r["asset_id"] for r in after["assets"]]
        detail = client.get("/api/v1/assets/cyl-b").json()
        assert detail["pending"] is False
        assert detail["verdicts"][0]["reviewer_id"] == "alice"
        # server stamps submission time when the client omits it
        assert detail["verdicts"][0]["timestamp"]

    def test_client_timestamp_preserved(self, client):
        stamp = "2026-01-05T09:00:00+00:00"
        client.post(
            "/api/v1/assets/cyl-b/verdicts", json=verdict_body("bob", timestamp=stamp)
        )
        detail = client.get("/api/v1/assets/cyl-b").json()
        by_reviewer = {v["reviewer_id"]: v for v in detail["verdicts"]}
        assert by_reviewer["bob"]["timestamp"] == stamp

    def test_duplicate_reviewer_409(self, client):
        assert (
            client.post("/api/v1/assets/cyl-b/verdicts", json=verdict_body("alice")).status_code
            == 409
        )

    def test_unknown_asset_404(self, client):
        assert (
            client.post("/api/v1/assets/ghost/verdicts", json=verdict_body()).status_code == 404
        )

    def test_body_asset_id_must_match_url(self, client):
        body = verdict_body("carol", asset_id="box-a")
        resp = client.post("/api/v1/assets/cyl-b/verdicts", json=body)
        assert resp.status_code == 422
        assert "does not match" in resp.json()["detail"]

    def test_malformed_bodies_422(self, client):
        bad_rating = verdict_body("carol")
        del bad_rating["ratings"]["grasp_point_selection"]
        resp = client.post("/api/v1/assets/cyl-b/verdicts", json=bad_rating)
        assert resp.status_code == 422
        assert "grasp_point_selection" in resp.text

        assert client.post("/api/v1/assets/cyl-b/verdicts", json=[1, 2]).status_code == 422
        resp = client.post(
            "/api/v1/assets/cyl-b/verdicts",
            content=b"{not json",
            headers={"content-type": "application/json"},
        )
        assert resp.status_code == 422
        # nothing above must have slipped into the store
        detail = client.get("/api/v1/assets/cyl-b").json()
        assert {v["reviewer_id"] for v in detail["verdicts"]} == {"alice", "bob"}


class TestAccuracy:
    @pytest.fixture()
    def small_client(self, fresh_store):
        rng = np.random.default_rng(42)
        for aid in ("a1", "a2"):
            fresh_store.save_manifest(aid, make_record(rng, aid))
        return TestClient(create_app(fresh_store))

    def test_empty_store_reports_none(self, small_client):
        data = small_client.get("/api/v1/review/accuracy").json()
        assert data["verdict_count"] == 0
        assert all(d["accuracy_pct"] is None for d in data["dimensions"].values())
        assert data["overall"]["accept_rate_pct"] is None

    def test_percentages_recomputable(self, small_client):
        plan = [
            ("r1", "a1", ()),
            ("r2", "a1", ("grasp_point_selection",)),
            ("r3", "a2", ("grasp_point_selection", "language_descriptions")),
            ("r4", "a2", ()),
        ]
        for reviewer, aid, wrong in plan:
            assert (
                small_client.post(
                    f"/api/v1/assets/{aid}/verdicts", json=verdict_body(reviewer, wrong)
                ).status_code
                == 201
            )
        data = small_client.get("/api/v1/review/accuracy").json()
        assert data["verdict_count"] == 4
        dims = data["dimensions"]
        assert dims["grasp_point_selection"] == {
            "correct": 2, "total": 4, "accuracy_pct": 50.0,
        }
        assert dims["language_descriptions"] == {
            "correct": 3, "total": 4, "accuracy_pct": 75.0,
        }
        assert dims["category_classification"]["accuracy_pct"] == 100.0
        assert data["overall"] == {"accept": 2, "total": 4, "accept_rate_pct": 50.0}


class TestSampling:
    @pytest.fixture()
    def many_store(self, fresh_store):
        rng = np.random.default_rng(9)
        for i in range(12):
            aid = f"s{i:02d}"
            fresh_store.save_manifest(aid, make_record(rng, aid))
        return fresh_store

    def test_rate_bounds(self, many_store):
        for bad in (0.0, -0.2, 1.2):
            with pytest.raises(ValueError):
                create_app(many_store, review_sample_rate=bad)
        create_app(many_store, review_sample_rate=1.0)

    def test_subset_is_hash_of_id(self, many_store):
        rate = 0.5
        client = TestClient(create_app(many_store, review_sample_rate=rate))
        listed = [r["asset_id"] for r in client.get("/api/v1/assets").json()["assets"]]
        expected = [
            aid
            for aid in many_store.list_pending()
            if int.from_bytes(hashlib.sha256(aid.encode()).digest()[:8], "big") / 2**64 < rate
        ]
        assert listed == expected
        assert 0 < len(listed) < 12

    def test_excluded_assets_still_have_detail(self, many_store):
        client = TestClient(create_app(many_store, review_sample_rate=0.5))
        listed = {r["asset_id"] for r in client.get("/api/v1/assets").json()["assets"]}
        excluded = sorted(set(many_store.list_annotated()) - listed)
        assert excluded
        assert client.get(f"/api/v1/assets/{excluded[0]}").status_code == 200
        # full queue view ignores the sample filter
        everything = client.get("/api/v1/assets", params={"status": "annotated"}).json()
        assert everything["total"] == 12


class TestStats:
    def test_endpoint_matches_library(self, client, review_store):
        assert client.get("/api/v1/stats").json() == compute_stats(review_store).to_dict()
