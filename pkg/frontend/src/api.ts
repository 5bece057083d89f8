/** Typed client for the review service under /api/v1.
 *
 * Failures split into two kinds the app treats differently: ApiError
 * carries an HTTP status and the server's detail message (conflicts,
 * validation, missing assets), NetworkError means the service was not
 * reachable at all and a retry may help.
 */

import type {
  AccuracyReport,
  AssetDetail,
  QueuePage,
  VerdictBody,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class NetworkError extends Error {
  readonly retryable = true;
  constructor(message: string) {
    super(message);
    this.name = "NetworkError";
  }
}

export type QueueStatus = "pending" | "annotated" | "all";

async function detailOf(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: unknown };
    if (typeof body.detail === "string") return body.detail;
  } catch {
    // non-JSON error body; fall through to the status line
  }
  return `${response.status} ${response.statusText}`;
}

export class Api {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = globalThis.fetch.bind(globalThis),
  ) {}

  /** Render and thumbnail URLs arrive server-relative. */
  absolute(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.absolute(path), init);
    } catch (err) {
      throw new NetworkError(`service unreachable: ${String(err)}`);
    }
    if (!response.ok) {
      throw new ApiError(await detailOf(response), response.status);
    }
    return (await response.json()) as T;
  }

  listAssets(status: QueueStatus = "pending", page = 1, pageSize = 20): Promise<QueuePage> {
    const query = new URLSearchParams({
      status,
      page: String(page),
      page_size: String(pageSize),
    });
    return this.request<QueuePage>(`/api/v1/assets?${query}`);
  }

  assetDetail(assetId: string): Promise<AssetDetail> {
    return this.request<AssetDetail>(`/api/v1/assets/${encodeURIComponent(assetId)}`);
  }

  submitVerdict(assetId: string, body: VerdictBody): Promise<{ status: string }> {
    return this.request(`/api/v1/assets/${encodeURIComponent(assetId)}/verdicts`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  accuracy(): Promise<AccuracyReport> {
    return this.request<AccuracyReport>("/api/v1/review/accuracy");
  }
}
