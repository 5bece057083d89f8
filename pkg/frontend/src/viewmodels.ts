/** Pure translations from API payloads to render-ready structures.
 * Everything here is synchronous and side-effect free; the DOM layer
 * stays dumb and the tests stay fast. */

import { DASH, fmtMass, fmtNumber, fmtPct, fmtPosition } from "./format.js";
import {
  DIMENSION_LABELS,
  REVIEW_DIMENSIONS,
  type AccuracyReport,
  type AssetDetail,
  type Overall,
  type QueuePage,
  type Rating,
  type ReviewDimension,
  type VerdictBody,
} from "./types.js";

// -- queue ------------------------------------------------------------

export interface QueueItemVM {
  assetId: string;
  thumbnailUrl: string | null;
  stageStatus: string;
  verdictCount: number;
}

export interface QueueVM {
  rows: QueueItemVM[];
  empty: boolean;
  emptyMessage: string;
  page: number;
  totalPages: number;
  total: number;
  hasPrev: boolean;
  hasNext: boolean;
}

export function pageCount(total: number, pageSize: number): number {
  return Math.ceil(total / pageSize);
}

export function queueVM(data: QueuePage): QueueVM {
  return {
    rows: data.assets.map((row) => ({
      assetId: row.asset_id,
      thumbnailUrl: row.thumbnail_url,
      stageStatus: row.stage_status ?? "unknown",
      verdictCount: row.verdict_count,
    })),
    empty: data.total === 0,
    emptyMessage: "Nothing waiting for review.",
    page: data.page,
    totalPages: data.total_pages,
    total: data.total,
    hasPrev: data.page > 1,
    hasNext: data.page < data.total_pages,
  };
}

// -- asset detail -----------------------------------------------------

export interface LabeledValue {
  label: string;
  value: string;
}

export interface PointVM {
  title: string;
  position: string;
  detail: string;
}

export interface GraspVM {
  index: number;
  passed: boolean;
  outcome: string;
  confidence: string;
}

export interface DetailVM {
  assetId: string;
  pending: boolean;
  renderUrls: string[];
  caption: LabeledValue[];
  captionSentence: string;
  physical: LabeledValue[];
  functionalPoints: PointVM[];
  graspPoints: PointVM[];
  grasps: GraspVM[];
  verifiedCount: number;
  proposalsRaw: number;
  noVerifiedGrasps: boolean;
  reviewedBy: string[];
}

export function detailVM(data: AssetDetail): DetailVM {
  const m = data.manifest;
  const grasps = data.grasps.map((g, index) => ({
    index,
    passed: g.verification?.passed ?? false,
    outcome: g.verification
      ? g.verification.passed
        ? "passed"
        : `failed: ${g.verification.failure_reason}`
      : "not judged",
    confidence: fmtNumber(g.confidence, 2),
  }));
  return {
    assetId: data.asset_id,
    pending: data.pending,
    renderUrls: data.render_urls,
    caption: [
      { label: "Category", value: m.caption.category },
      { label: "Color", value: m.caption.color },
      { label: "Material", value: m.caption.material },
      { label: "Size", value: m.caption.size },
      { label: "Shape", value: m.caption.shape },
      { label: "Function", value: m.caption.function },
    ],
    captionSentence: `A ${m.caption.color} ${m.caption.material} ${m.caption.category}; ${m.caption.function}.`,
    physical: [
      { label: "Box dims (m)", value: fmtPosition(m.physical.obb_dims) },
      { label: "Mass", value: fmtMass(m.physical.mass) },
      { label: "Friction", value: fmtNumber(m.physical.friction, 2) },
      {
        label: "Footprint radius",
        value: `${fmtNumber(m.placement.collision_radius, 3)} m`,
      },
    ],
    functionalPoints: m.functional_points.map((p) => ({
      title: `#${p.id} ${p.function_label}`,
      position: fmtPosition(p.position),
      detail: p.rationale,
    })),
    graspPoints: m.grasp_points.map((p) => ({
      title: `#${p.id} ${p.grasp_type}`,
      position: fmtPosition(p.position),
      detail: p.use_scenario,
    })),
    grasps,
    verifiedCount: grasps.filter((g) => g.passed).length,
    proposalsRaw: data.proposals_raw,
    noVerifiedGrasps: grasps.every((g) => !g.passed),
    reviewedBy: data.verdicts.map((v) => v.reviewer_id),
  };
}

// -- verdict form -----------------------------------------------------

export interface VerdictForm {
  ratings: Partial<Record<ReviewDimension, Rating>>;
  overall?: Overall;
  note: string;
}

export function emptyForm(): VerdictForm {
  return { ratings: {}, note: "" };
}

export function missingDimensions(form: VerdictForm): ReviewDimension[] {
  return REVIEW_DIMENSIONS.filter((d) => form.ratings[d] === undefined);
}

/** Client-side mirror of the server rule: all five dimensions and an
 * overall call, or no submit button. */
export function formComplete(form: VerdictForm): boolean {
  return missingDimensions(form).length === 0 && form.overall !== undefined;
}

export function toVerdictBody(form: VerdictForm, reviewerId: string): VerdictBody {
  if (!formComplete(form)) {
    const missing = missingDimensions(form).join(", ") || "overall";
    throw new Error(`verdict incomplete: ${missing}`);
  }
  const body: VerdictBody = {
    reviewer_id: reviewerId,
    ratings: { ...(form.ratings as Record<ReviewDimension, Rating>) },
    overall: form.overall as Overall,
  };
  if (form.note.trim()) body.note = form.note.trim();
  return body;
}

// -- dashboard --------------------------------------------------------

export interface DashboardRow {
  dimension: string;
  label: string;
  counts: string;
  display: string;
}

export interface DashboardVM {
  verdictCount: number;
  rows: DashboardRow[];
  overall: DashboardRow;
}

export function dashboardVM(report: AccuracyReport): DashboardVM {
  const rows = REVIEW_DIMENSIONS.map((dim) => {
    const entry = report.dimensions[dim];
    return {
      dimension: dim,
      label: DIMENSION_LABELS[dim],
      counts: entry && entry.total > 0 ? `${entry.correct}/${entry.total}` : DASH,
      display: fmtPct(entry?.accuracy_pct),
    };
  });
  return {
    verdictCount: report.verdict_count,
    rows,
    overall: {
      dimension: "overall",
      label: "Overall accept",
      counts:
        report.overall.total > 0 ? `${report.overall.accept}/${report.overall.total}` : DASH,
      display: fmtPct(report.overall.accept_rate_pct),
    },
  };
}
