import { describe, expect, it } from "vitest";
import type { AccuracyReport, AssetDetail, QueuePage } from "../src/types.js";
import {
  dashboardVM,
  detailVM,
  emptyForm,
  formComplete,
  missingDimensions,
  pageCount,
  queueVM,
  toVerdictBody,
} from "../src/viewmodels.js";

function queuePage(overrides: Partial<QueuePage> = {}): QueuePage {
  return {
    assets: [
      {
        asset_id: "mug-0",
        pending: true,
        stage_status: "ok",
        thumbnail_url: "/api/v1/assets/mug-0/renders/0",
        verdict_count: 0,
      },
      {
        asset_id: "mug-1",
        pending: true,
        stage_status: null,
        thumbnail_url: null,
        verdict_count: 2,
      },
    ],
    page: 1,
    page_size: 20,
    total: 2,
    total_pages: 1,
    ...overrides,
  };
}

const DETAIL: AssetDetail = {
  asset_id: "mug-0",
  pending: true,
  manifest: {
    asset_id: "mug-0",
    mesh_ref: "mesh.obj",
    physical: { obb_dims: [0.08, 0.08, 0.1], mass: 0.25, friction: 0.5 },
    caption: {
      category: "mug",
      color: "blue",
      material: "ceramic",
      size: "small",
      shape: "cylindrical",
      function: "holds drinks",
    },
    functional_points: [
      {
        id: 0,
        position: [0.04, 0, 0.05],
        function_label: "handle",
        confidence: 0.9,
        rationale: "protrusion on the side",
      },
      {
        id: 1,
        position: [0, 0, 0.1],
        function_label: "rim",
        confidence: 0.8,
        rationale: "opening at the top",
      },
    ],
    grasp_points: [
      { id: 0, position: [0.04, 0, 0.05], grasp_type: "pinch", use_scenario: "lift by handle" },
    ],
    verified_grasps: [],
    placement: { position: [0, 0, 0.05], orientation: [1, 0, 0, 0], collision_radius: 0.06 },
  },
  render_urls: ["/api/v1/assets/mug-0/renders/0", "/api/v1/assets/mug-0/renders/1"],
  proposals_raw: 40,
  grasps: [
    {
      position: [0.04, 0, 0.05],
      orientation: [1, 0, 0, 0],
      confidence: 0.91,
      associated_functional_point: 0,
      associated_grasp_point: 0,
      verification: { passed: false, failure_reason: "no_contact", stable_frames: 0, max_displacement: 1 },
    },
    {
      position: [0, 0, 0.08],
      orientation: [1, 0, 0, 0],
      confidence: 0.55,
      associated_functional_point: null,
      associated_grasp_point: null,
      verification: null,
    },
  ],
  verdicts: [
    {
      asset_id: "mug-0",
      reviewer_id: "alice",
      ratings: { category_classification: "correct" },
      overall: "accept",
    },
  ],
};

describe("queueVM", () => {
  it("computes page counts the way the server does", () => {
    expect(pageCount(50, 20)).toBe(3);
    expect(pageCount(20, 20)).toBe(1);
    expect(pageCount(0, 20)).toBe(0);
  });

  it("maps rows and paging flags", () => {
    const vm = queueVM(queuePage());
    expect(vm.rows.map((r) => r.assetId)).toEqual(["mug-0", "mug-1"]);
    expect(vm.rows[1]!.stageStatus).toBe("unknown");
    expect(vm.empty).toBe(false);
    expect(vm.hasPrev).toBe(false);
    expect(vm.hasNext).toBe(false);
  });

  it("flags an empty queue with a friendly message", () => {
    const vm = queueVM(queuePage({ assets: [], total: 0, total_pages: 0 }));
    expect(vm.empty).toBe(true);
    expect(vm.emptyMessage).toMatch(/nothing/i);
  });

  it("enables both pager directions from a middle page", () => {
    const vm = queueVM(queuePage({ page: 2, total: 50, total_pages: 3 }));
    expect(vm.hasPrev).toBe(true);
    expect(vm.hasNext).toBe(true);
  });
});

describe("detailVM", () => {
  const vm = detailVM(DETAIL);

  it("keeps every annotated point", () => {
    expect(vm.functionalPoints).toHaveLength(2);
    expect(vm.functionalPoints[0]!.title).toBe("#0 handle");
    expect(vm.graspPoints).toHaveLength(1);
    expect(vm.graspPoints[0]!.detail).toBe("lift by handle");
  });

  it("summarizes grasp outcomes including unjudged ones", () => {
    expect(vm.grasps.map((g) => g.outcome)).toEqual(["failed: no_contact", "not judged"]);
    expect(vm.verifiedCount).toBe(0);
    expect(vm.noVerifiedGrasps).toBe(true);
    expect(vm.proposalsRaw).toBe(40);
  });

  it("formats the physical block", () => {
    const byLabel = new Map(vm.physical.map((row) => [row.label, row.value]));
    expect(byLabel.get("Mass")).toBe("250 g");
    expect(byLabel.get("Footprint radius")).toBe("0.060 m");
  });

  it("lists prior reviewers", () => {
    expect(vm.reviewedBy).toEqual(["alice"]);
  });
});

describe("verdict form", () => {
  it("requires all five dimensions plus an overall call", () => {
    const form = emptyForm();
    expect(formComplete(form)).toBe(false);
    expect(missingDimensions(form)).toHaveLength(5);

    form.ratings.category_classification = "correct";
    form.ratings.language_descriptions = "correct";
    form.ratings.functional_point_labels = "incorrect";
    form.ratings.physical_property_estimation = "correct";
    expect(formComplete(form)).toBe(false);
    expect(missingDimensions(form)).toEqual(["grasp_point_selection"]);

    form.ratings.grasp_point_selection = "correct";
    expect(formComplete(form)).toBe(false);

    form.overall = "accept";
    expect(formComplete(form)).toBe(true);
  });

  it("refuses to build a body from an incomplete form", () => {
    const form = emptyForm();
    form.ratings.category_classification = "correct";
    expect(() => toVerdictBody(form, "me")).toThrow(/grasp_point_selection/);
  });

  it("builds a submission body with a trimmed note", () => {
    const form = emptyForm();
    for (const dim of [
      "category_classification",
      "language_descriptions",
      "functional_point_labels",
      "physical_property_estimation",
      "grasp_point_selection",
    ] as const) {
      form.ratings[dim] = "correct";
    }
    form.overall = "reject";
    form.note = "  bad mesh  ";
    const body = toVerdictBody(form, "me");
    expect(body.reviewer_id).toBe("me");
    expect(body.overall).toBe("reject");
    expect(body.note).toBe("bad mesh");
    expect(Object.keys(body.ratings)).toHaveLength(5);
  });

  it("omits an empty note", () => {
    const form = emptyForm();
    for (const dim of missingDimensions(form)) form.ratings[dim] = "correct";
    form.overall = "accept";
    expect("note" in toVerdictBody(form, "me")).toBe(false);
  });
});

describe("dashboardVM", () => {
  const report: AccuracyReport = {
    verdict_count: 475,
    dimensions: {
      category_classification: { correct: 475, total: 475, accuracy_pct: 100.0 },
      language_descriptions: { correct: 473, total: 475, accuracy_pct: 99.57894736842105 },
      functional_point_labels: { correct: 438, total: 475, accuracy_pct: 92.21052631578948 },
      physical_property_estimation: { correct: 438, total: 475, accuracy_pct: 92.21052631578948 },
      grasp_point_selection: { correct: 403, total: 475, accuracy_pct: 84.84210526315789 },
    },
    overall: { accept: 475, total: 475, accept_rate_pct: 100.0 },
  };

  it("renders one-decimal accuracies in server dimension order", () => {
    const vm = dashboardVM(report);
    expect(vm.rows.map((r) => r.display)).toEqual(["100.0", "99.6", "92.2", "92.2", "84.8"]);
    expect(vm.rows[4]!.counts).toBe("403/475");
    expect(vm.overall.display).toBe("100.0");
    expect(vm.verdictCount).toBe(475);
  });

  it("uses dashes when no verdicts exist", () => {
    const empty: AccuracyReport = {
      verdict_count: 0,
      dimensions: {
        category_classification: { correct: 0, total: 0, accuracy_pct: null },
        language_descriptions: { correct: 0, total: 0, accuracy_pct: null },
        functional_point_labels: { correct: 0, total: 0, accuracy_pct: null },
        physical_property_estimation: { correct: 0, total: 0, accuracy_pct: null },
        grasp_point_selection: { correct: 0, total: 0, accuracy_pct: null },
      },
      overall: { accept: 0, total: 0, accept_rate_pct: null },
    };
    const vm = dashboardVM(empty);
    expect(new Set(vm.rows.map((r) => r.display))).toEqual(new Set(["—"]));
    expect(vm.overall.counts).toBe("—");
  });
});
