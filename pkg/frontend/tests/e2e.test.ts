/** Full-stack review flow against a live service.
 *
 * Seeds a 20-asset fixture store (last asset held out with no verdicts,
 * verdict history tuned so grasp-point accuracy displays 84.8), starts
 * the real HTTP service on a scratch port, and drives the compiled UI
 * through a DOM: queue, detail, verdict submission, dashboard.
 */

import { execFileSync, spawn, type ChildProcessWithoutNullStreams } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import net from "node:net";
import { tmpdir } from "node:os";
import path from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { Api, ApiError } from "../src/api.js";
import { App } from "../src/app.js";
import { REVIEW_DIMENSIONS } from "../src/types.js";
import { toVerdictBody, emptyForm } from "../src/viewmodels.js";

const HERE = path.dirname(fileURLToPath(import.meta.url));
const REPO_ROOT = path.resolve(HERE, "..", "..");
const PORT = 8300 + Math.floor(Math.random() * 500);
const BASE = `http://127.0.0.1:${PORT}`;

let storeDir: string;
let server: ChildProcessWithoutNullStreams;
let serverLog = "";

let api: Api;
let app: App;
let root: HTMLElement;
const visited: string[] = [];

async function waitFor<T>(probe: () => T | null | undefined, what: string, timeoutMs = 20000): Promise<T> {
  const start = Date.now();
  for (;;) {
    const value = probe();
    if (value) return value;
    if (Date.now() - start > timeoutMs) {
      throw new Error(`timed out waiting for ${what}\nserver log tail:\n${serverLog.slice(-2000)}`);
    }
    await new Promise((resolve) => setTimeout(resolve, 50));
  }
}

beforeAll(async () => {
  storeDir = mkdtempSync(path.join(tmpdir(), "review-ui-e2e-"));
  const seeded = execFileSync(
    "python3",
    [path.join(REPO_ROOT, "scripts", "seed_review_fixture.py"), "--store", storeDir, "--holdout-asset"],
    { encoding: "utf8" },
  );
  expect(seeded).toContain("403/475 = 84.8");

  server = spawn(
    "python3",
    ["-m", "assetforge", "serve", "--store", storeDir, "--port", String(PORT)],
    { cwd: REPO_ROOT },
  );
  server.stdout.on("data", (chunk: Buffer) => (serverLog += chunk.toString()));
  server.stderr.on("data", (chunk: Buffer) => (serverLog += chunk.toString()));

  // same-origin with the service so the DOM fetch path needs no CORS
  (window as unknown as { happyDOM?: { setURL?: (u: string) => void } }).happyDOM?.setURL?.(BASE);

  // bare TCP probe; a fetch here would spam the log with the refusals
  const portOpen = () =>
    new Promise<boolean>((resolve) => {
      const sock = net.connect({ port: PORT, host: "127.0.0.1" }, () => {
        sock.end();
        resolve(true);
      });
      sock.on("error", () => resolve(false));
    });
  const deadline = Date.now() + 60000;
  while (!(await portOpen())) {
    if (Date.now() > deadline) {
      throw new Error(`service never came up\n${serverLog.slice(-2000)}`);
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  const res = await fetch(`${BASE}/api/v1/assets?status=all&page=1&page_size=1`);
  expect(res.ok).toBe(true);

  api = new Api(BASE);
  root = document.createElement("main");
  document.body.append(root);
  app = new App(root, api, "ui-reviewer", (hash) => {
    visited.push(hash);
    void app.show(
      hash === "#/queue"
        ? { view: "queue", page: 1 }
        : { view: "asset", assetId: decodeURIComponent(hash.slice("#/asset/".length)) },
    );
  });
});

afterAll(() => {
  server?.kill();
  if (storeDir) rmSync(storeDir, { recursive: true, force: true });
});

function fillAllCorrect(container: HTMLElement): void {
  for (const fieldset of container.querySelectorAll("fieldset.dimension")) {
    const input = fieldset.querySelector<HTMLInputElement>('input[value="correct"]')!;
    input.checked = true;
    input.dispatchEvent(new Event("change"));
  }
  const accept = container.querySelector<HTMLInputElement>(
    'fieldset.overall input[value="accept"]',
  )!;
  accept.checked = true;
  accept.dispatchEvent(new Event("change"));
}

describe("review UI against a live service", () => {
  it("lists the held-out asset as the whole pending queue", async () => {
    const all = await api.listAssets("all", 1, 100);
    expect(all.total).toBe(20);

    await app.show({ view: "queue", page: 1 });
    const rows = await waitFor(() => {
      const found = root.querySelectorAll<HTMLElement>(".queue-row");
      return found.length > 0 ? found : null;
    }, "pending queue rows");
    expect(rows).toHaveLength(1);
    expect(rows[0]!.dataset.assetId).toBe("fixture-19");
    expect(rows[0]!.querySelector(".verdicts")!.textContent).toBe("0 verdicts");
    expect(root.querySelector(".page-label")!.textContent).toBe("Page 1 of 1");
  });

  it("renders detail with all five verdict dimensions and live renders", async () => {
    root.querySelector<HTMLElement>(".queue-row")!.click();
    await waitFor(() => root.querySelector("fieldset.dimension"), "asset detail");
    expect(visited).toContain("#/asset/fixture-19");
    expect(root.querySelector("h1.title")!.textContent).toBe("fixture-19");

    const dims = [...root.querySelectorAll<HTMLElement>("fieldset.dimension")].map(
      (f) => f.dataset.dimension,
    );
    expect(dims).toEqual([...REVIEW_DIMENSIONS]);

    const img = root.querySelector<HTMLImageElement>("img.render");
    expect(img).not.toBeNull();
    const res = await fetch(img!.src);
    expect(res.status).toBe(200);
    const head = new Uint8Array(await res.arrayBuffer()).slice(0, 8);
    expect([...head]).toEqual([137, 80, 78, 71, 13, 10, 26, 10]);

    // the held-out fixture asset carries zero verified grasps
    expect(root.querySelector(".no-verified")).not.toBeNull();
  });

  it("reproduces the server accuracies to one decimal before the new verdict", async () => {
    const report = await api.accuracy();
    expect(report.verdict_count).toBe(475);

    await app.show({ view: "dashboard" });
    await waitFor(() => root.querySelector("table.accuracy"), "dashboard table");

    const cells = new Map(
      [...root.querySelectorAll<HTMLElement>(".accuracy-row")].map((row) => [
        row.dataset.dimension,
        row.querySelector(".pct")!.textContent,
      ]),
    );
    expect([...REVIEW_DIMENSIONS].map((d) => cells.get(d))).toEqual([
      "100.0",
      "99.6",
      "92.2",
      "92.2",
      "84.8",
    ]);
    for (const dim of REVIEW_DIMENSIONS) {
      const { correct, total } = report.dimensions[dim]!;
      expect(cells.get(dim)).toBe(((100 * correct) / total).toFixed(1));
    }
    expect(cells.get("overall")).toBe(
      ((100 * report.overall.accept) / report.overall.total).toFixed(1),
    );
  });

  it("submits a verdict that removes the asset from pending", async () => {
    await app.show({ view: "asset", assetId: "fixture-19" });
    await waitFor(() => root.querySelector("fieldset.dimension"), "detail form");

    const submit = root.querySelector<HTMLButtonElement>("button.submit-verdict")!;
    expect(submit.disabled).toBe(true);
    fillAllCorrect(root);
    expect(submit.disabled).toBe(false);
    submit.click();

    await waitFor(() => root.querySelector(".empty-state"), "empty queue after submit");
    expect(root.querySelector(".empty-state")!.textContent).toBe("Nothing waiting for review.");
    expect(visited).toContain("#/queue");

    const pending = await api.listAssets("pending", 1, 100);
    expect(pending.total).toBe(0);

    const detail = await api.assetDetail("fixture-19");
    expect(detail.pending).toBe(false);
    expect(detail.verdicts.map((v) => v.reviewer_id)).toContain("ui-reviewer");
  });

  it("rejects a duplicate verdict from the same reviewer", async () => {
    const form = emptyForm();
    for (const dim of REVIEW_DIMENSIONS) form.ratings[dim] = "correct";
    form.overall = "accept";
    const err = await api
      .submitVerdict("fixture-19", toVerdictBody(form, "ui-reviewer"))
      .catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(409);
  });

  it("keeps the dashboard in lockstep with the server after the submission", async () => {
    const report = await api.accuracy();
    expect(report.verdict_count).toBe(476);

    await app.show({ view: "dashboard" });
    await waitFor(() => root.querySelector("table.accuracy"), "dashboard table");
    const cells = new Map(
      [...root.querySelectorAll<HTMLElement>(".accuracy-row")].map((row) => [
        row.dataset.dimension,
        row.querySelector(".pct")!.textContent,
      ]),
    );
    for (const dim of REVIEW_DIMENSIONS) {
      const { correct, total } = report.dimensions[dim]!;
      expect(cells.get(dim)).toBe(((100 * correct) / total).toFixed(1));
    }
    // one more all-correct verdict nudges the grasp figure off 84.8
    expect(cells.get("grasp_point_selection")).toBe("84.9");
    expect(root.querySelector(".verdict-count")!.textContent).toBe("476 verdicts");
  });
});
