/** App shell: hash router plus one controller per screen.
 *
 * State lives server-side; the client refetches on every navigation,
 * so a submitted verdict disappears from the queue without any local
 * bookkeeping.
 */

import { Api, ApiError } from "./api.js";
import type { AssetDetail } from "./types.js";
import {
  dashboardVM,
  detailVM,
  queueVM,
  toVerdictBody,
  type VerdictForm,
} from "./viewmodels.js";
import {
  renderDashboard,
  renderDetail,
  renderError,
  renderNotice,
  renderQueue,
} from "./views.js";

const PAGE_SIZE = 20;
const REVIEWER_KEY = "assetforge.reviewer";

export type Route =
  | { view: "queue"; page: number }
  | { view: "asset"; assetId: string }
  | { view: "dashboard" };

export function parseRoute(hash: string): Route {
  const path = hash.replace(/^#/, "");
  if (path.startsWith("/asset/")) {
    return { view: "asset", assetId: decodeURIComponent(path.slice("/asset/".length)) };
  }
  if (path === "/dashboard") {
    return { view: "dashboard" };
  }
  const match = /^\/queue(?:\?page=(\d+))?$/.exec(path);
  const page = match?.[1] ? Number(match[1]) : 1;
  return { view: "queue", page: Math.max(1, page) };
}

interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

/** Stable per-tab identity so a refresh cannot double-submit under a
 * new name. */
export function reviewerId(storage: StorageLike): string {
  const existing = storage.getItem(REVIEWER_KEY);
  if (existing) return existing;
  const fresh = `reviewer-${Math.random().toString(36).slice(2, 10)}`;
  storage.setItem(REVIEWER_KEY, fresh);
  return fresh;
}

export class App {
  /** Shown once at the top of the next queue render, then dropped. */
  private notice: string | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: Api,
    private readonly reviewer: string,
    private readonly navigate: (hash: string) => void,
  ) {}

  async show(route: Route): Promise<void> {
    try {
      if (route.view === "queue") await this.showQueue(route.page);
      else if (route.view === "asset") await this.showAsset(route.assetId);
      else await this.showDashboard();
    } catch (err) {
      renderError(this.root, err instanceof Error ? err.message : String(err), () => {
        void this.show(route);
      });
    }
  }

  private async showQueue(page: number): Promise<void> {
    const data = await this.api.listAssets("pending", page, PAGE_SIZE);
    renderQueue(this.root, queueVM(data), {
      onOpen: (assetId) => this.navigate(`#/asset/${encodeURIComponent(assetId)}`),
      onPage: (next) => this.navigate(`#/queue?page=${next}`),
    });
    if (this.notice) {
      renderNotice(this.root, this.notice);
      this.notice = null;
    }
  }

  private async showAsset(assetId: string): Promise<void> {
    let data: AssetDetail;
    try {
      data = await this.api.assetDetail(assetId);
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) {
        this.notice = `Asset not found: ${err.message}`;
        this.navigate("#/queue");
        return;
      }
      throw err;
    }
    renderDetail(this.root, detailVM(data), {
      absoluteUrl: (path) => this.api.absolute(path),
      onBack: () => this.navigate("#/queue"),
      onSubmit: (form) => {
        void this.submit(assetId, form);
      },
    });
  }

  private async submit(assetId: string, form: VerdictForm): Promise<void> {
    try {
      await this.api.submitVerdict(assetId, toVerdictBody(form, this.reviewer));
      this.navigate("#/queue");
    } catch (err) {
      const message =
        err instanceof ApiError && err.status === 409
          ? `Already reviewed: ${err.message}`
          : err instanceof Error
            ? err.message
            : String(err);
      renderError(this.root, message, () => {
        void this.show({ view: "asset", assetId });
      });
    }
  }

  private async showDashboard(): Promise<void> {
    const report = await this.api.accuracy();
    renderDashboard(this.root, dashboardVM(report));
  }
}

function renderNav(header: HTMLElement): void {
  const doc = header.ownerDocument;
  header.replaceChildren();
  for (const [label, hash] of [
    ["Queue", "#/queue"],
    ["Dashboard", "#/dashboard"],
  ] as const) {
    const link = doc.createElement("a");
    link.href = hash;
    link.textContent = label;
    link.className = "nav-link";
    header.append(link);
  }
}

export function boot(win: Window & typeof globalThis): App | null {
  const doc = win.document;
  const root = doc.getElementById("app");
  if (!root) return null;

  const header = doc.getElementById("nav");
  if (header) renderNav(header);

  const baseUrl = (globalThis as { ASSETFORGE_API?: string }).ASSETFORGE_API ?? "";
  const app = new App(root, new Api(baseUrl), reviewerId(win.sessionStorage), (hash) => {
    if (win.location.hash === hash) {
      void app.show(parseRoute(hash));
    } else {
      win.location.hash = hash;
    }
  });

  const onRoute = () => {
    void app.show(parseRoute(win.location.hash));
  };
  win.addEventListener("hashchange", onRoute);
  onRoute();
  return app;
}

if (typeof window !== "undefined" && window.document?.getElementById("app")) {
  boot(window);
}
