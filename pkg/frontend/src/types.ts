/** Shapes of the /api/v1 JSON payloads, mirrored field for field.
 * Nothing in the UI invents state: every rendered value comes from one
 * of these. */

export const REVIEW_DIMENSIONS = [
  "category_classification",
  "language_descriptions",
  "functional_point_labels",
  "physical_property_estimation",
  "grasp_point_selection",
] as const;

export type ReviewDimension = (typeof REVIEW_DIMENSIONS)[number];

export const DIMENSION_LABELS: Record<ReviewDimension, string> = {
  category_classification: "Category",
  language_descriptions: "Descriptions",
  functional_point_labels: "Functional points",
  physical_property_estimation: "Physical properties",
  grasp_point_selection: "Grasp points",
};

export type Rating = "correct" | "incorrect";
export type Overall = "accept" | "reject";

export interface QueueRow {
  asset_id: string;
  pending: boolean;
  stage_status: string | null;
  thumbnail_url: string | null;
  verdict_count: number;
}

export interface QueuePage {
  assets: QueueRow[];
  page: number;
  page_size: number;
  total: number;
  total_pages: number;
}

export type Vec3 = [number, number, number];

export interface FunctionalPoint {
  id: number;
  position: Vec3;
  function_label: string;
  confidence: number;
  rationale: string;
}

export interface GraspPoint {
  id: number;
  position: Vec3;
  grasp_type: string;
  use_scenario: string;
}

export interface VerificationOutcome {
  passed: boolean;
  failure_reason: string;
  stable_frames: number;
  max_displacement: number;
}

export interface Grasp {
  position: Vec3;
  orientation: [number, number, number, number];
  confidence: number;
  associated_functional_point: number | null;
  associated_grasp_point: number | null;
  verification: VerificationOutcome | null;
}

export interface Manifest {
  asset_id: string;
  mesh_ref: string;
  physical: { obb_dims: Vec3; mass: number; friction: number };
  caption: {
    category: string;
    color: string;
    material: string;
    size: string;
    shape: string;
    function: string;
  };
  functional_points: FunctionalPoint[];
  grasp_points: GraspPoint[];
  verified_grasps: Grasp[];
  placement: { position: Vec3; orientation: number[]; collision_radius: number };
}

export interface Verdict {
  asset_id: string;
  reviewer_id: string;
  ratings: Record<string, Rating>;
  overall: Overall;
  note?: string;
  timestamp?: string | null;
}

export interface AssetDetail {
  asset_id: string;
  pending: boolean;
  manifest: Manifest;
  render_urls: string[];
  proposals_raw: number;
  grasps: Grasp[];
  verdicts: Verdict[];
}

export interface DimensionAccuracy {
  correct: number;
  total: number;
  accuracy_pct: number | null;
}

export interface AccuracyReport {
  verdict_count: number;
  dimensions: Record<string, DimensionAccuracy>;
  overall: { accept: number; total: number; accept_rate_pct: number | null };
}

export interface VerdictBody {
  asset_id?: string;
  reviewer_id: string;
  ratings: Record<ReviewDimension, Rating>;
  overall: Overall;
  note?: string;
}
