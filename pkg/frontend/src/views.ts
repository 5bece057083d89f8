/** DOM rendering. Each render function clears its container and
 * rebuilds from a view model; handlers are injected so these stay
 * testable without the router. */

import type {
  DashboardVM,
  DetailVM,
  QueueVM,
  VerdictForm,
} from "./viewmodels.js";
import { formComplete, missingDimensions } from "./viewmodels.js";
import {
  DIMENSION_LABELS,
  REVIEW_DIMENSIONS,
  type Overall,
  type Rating,
} from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export interface QueueHandlers {
  onOpen: (assetId: string) => void;
  onPage: (page: number) => void;
}

export function renderQueue(container: HTMLElement, vm: QueueVM, handlers: QueueHandlers): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  container.append(el(doc, "h1", "title", "Review queue"));

  if (vm.empty) {
    container.append(el(doc, "p", "empty-state", vm.emptyMessage));
    return;
  }

  const list = el(doc, "ul", "queue");
  for (const row of vm.rows) {
    const item = el(doc, "li", "queue-row");
    item.dataset.assetId = row.assetId;
    if (row.thumbnailUrl) {
      const img = el(doc, "img", "thumb");
      img.src = row.thumbnailUrl;
      img.alt = row.assetId;
      item.append(img);
    }
    item.append(el(doc, "span", "asset-id", row.assetId));
    item.append(el(doc, "span", "stage", row.stageStatus));
    item.append(el(doc, "span", "verdicts", `${row.verdictCount} verdicts`));
    item.addEventListener("click", () => handlers.onOpen(row.assetId));
    list.append(item);
  }
  container.append(list);

  const pager = el(doc, "div", "pager");
  const prev = el(doc, "button", "page-prev", "Previous");
  prev.disabled = !vm.hasPrev;
  prev.addEventListener("click", () => handlers.onPage(vm.page - 1));
  const next = el(doc, "button", "page-next", "Next");
  next.disabled = !vm.hasNext;
  next.addEventListener("click", () => handlers.onPage(vm.page + 1));
  pager.append(prev, el(doc, "span", "page-label", `Page ${vm.page} of ${vm.totalPages}`), next);
  container.append(pager);
}

export interface DetailHandlers {
  onSubmit: (form: VerdictForm) => void;
  onBack: () => void;
  absoluteUrl: (path: string) => string;
}

function section(doc: Document, title: string, className: string): HTMLElement {
  const box = el(doc, "section", className);
  box.append(el(doc, "h2", undefined, title));
  return box;
}

export function renderDetail(container: HTMLElement, vm: DetailVM, handlers: DetailHandlers): void {
  const doc = container.ownerDocument;
  container.replaceChildren();

  const back = el(doc, "button", "back", "Back to queue");
  back.addEventListener("click", () => handlers.onBack());
  container.append(back, el(doc, "h1", "title", vm.assetId));

  const renders = section(doc, "Renders", "renders");
  for (const url of vm.renderUrls) {
    const img = el(doc, "img", "render");
    img.src = handlers.absoluteUrl(url);
    img.alt = `${vm.assetId} render`;
    renders.append(img);
  }
  container.append(renders);

  const caption = section(doc, "Caption", "caption");
  caption.append(el(doc, "p", "caption-sentence", vm.captionSentence));
  const capList = el(doc, "dl");
  for (const item of vm.caption) {
    capList.append(el(doc, "dt", undefined, item.label), el(doc, "dd", undefined, item.value));
  }
  caption.append(capList);
  container.append(caption);

  const physical = section(doc, "Physical", "physical");
  const physList = el(doc, "dl");
  for (const item of vm.physical) {
    physList.append(el(doc, "dt", undefined, item.label), el(doc, "dd", undefined, item.value));
  }
  physical.append(physList);
  container.append(physical);

  const points = section(doc, "Annotated points", "points");
  for (const [heading, group] of [
    ["Functional", vm.functionalPoints],
    ["Grasp", vm.graspPoints],
  ] as const) {
    points.append(el(doc, "h3", undefined, heading));
    if (group.length === 0) {
      points.append(el(doc, "p", "none", "none"));
      continue;
    }
    const list = el(doc, "ul", `${heading.toLowerCase()}-points`);
    for (const p of group) {
      const item = el(doc, "li", "point");
      item.append(
        el(doc, "span", "point-title", p.title),
        el(doc, "span", "point-pos", p.position),
        el(doc, "span", "point-detail", p.detail),
      );
      list.append(item);
    }
    points.append(list);
  }
  container.append(points);

  const grasps = section(doc, "Grasp outcomes", "grasps");
  grasps.append(
    el(
      doc,
      "p",
      "grasp-summary",
      `${vm.verifiedCount} verified of ${vm.grasps.length} candidates (${vm.proposalsRaw} raw proposals)`,
    ),
  );
  if (vm.noVerifiedGrasps) {
    grasps.append(el(doc, "p", "no-verified", "No verified grasps"));
  }
  const graspList = el(doc, "ul", "grasp-list");
  for (const g of vm.grasps) {
    const item = el(doc, "li", g.passed ? "grasp pass" : "grasp fail");
    item.append(
      el(doc, "span", "grasp-index", `#${g.index}`),
      el(doc, "span", "grasp-outcome", g.outcome),
      el(doc, "span", "grasp-confidence", `conf ${g.confidence}`),
    );
    graspList.append(item);
  }
  grasps.append(graspList);
  container.append(grasps);

  container.append(renderVerdictForm(doc, vm, handlers));
}

function renderVerdictForm(doc: Document, vm: DetailVM, handlers: DetailHandlers): HTMLElement {
  const form: VerdictForm = { ratings: {}, note: "" };
  const box = section(doc, "Your verdict", "verdict-form");

  if (vm.reviewedBy.length > 0) {
    box.append(
      el(doc, "p", "reviewed-by", `Already reviewed by: ${vm.reviewedBy.join(", ")}`),
    );
  }

  const submit = el(doc, "button", "submit-verdict", "Submit verdict");
  submit.disabled = true;
  const hint = el(doc, "p", "form-hint", "");

  const refresh = () => {
    submit.disabled = !formComplete(form);
    const missing = missingDimensions(form);
    hint.textContent = submit.disabled
      ? `Still needed: ${[...missing, ...(form.overall ? [] : ["overall"])].join(", ")}`
      : "Ready to submit.";
  };

  for (const dim of REVIEW_DIMENSIONS) {
    const row = el(doc, "fieldset", "dimension");
    row.dataset.dimension = dim;
    row.append(el(doc, "legend", undefined, DIMENSION_LABELS[dim]));
    for (const rating of ["correct", "incorrect"] as Rating[]) {
      const label = el(doc, "label", rating);
      const input = el(doc, "input") as HTMLInputElement;
      input.type = "radio";
      input.name = dim;
      input.value = rating;
      input.addEventListener("change", () => {
        form.ratings[dim] = rating;
        refresh();
      });
      label.append(input, doc.createTextNode(rating));
      row.append(label);
    }
    box.append(row);
  }

  const overallRow = el(doc, "fieldset", "overall");
  overallRow.append(el(doc, "legend", undefined, "Overall"));
  for (const overall of ["accept", "reject"] as Overall[]) {
    const label = el(doc, "label", overall);
    const input = el(doc, "input") as HTMLInputElement;
    input.type = "radio";
    input.name = "overall";
    input.value = overall;
    input.addEventListener("change", () => {
      form.overall = overall;
      refresh();
    });
    label.append(input, doc.createTextNode(overall));
    overallRow.append(label);
  }
  box.append(overallRow);

  const note = el(doc, "textarea", "note") as HTMLTextAreaElement;
  note.placeholder = "Optional note";
  note.addEventListener("input", () => {
    form.note = note.value;
  });
  box.append(note);

  submit.addEventListener("click", () => {
    if (formComplete(form)) handlers.onSubmit(form);
  });
  refresh();
  box.append(hint, submit);
  return box;
}

export function renderDashboard(container: HTMLElement, vm: DashboardVM): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  container.append(el(doc, "h1", "title", "Review accuracy"));
  container.append(el(doc, "p", "verdict-count", `${vm.verdictCount} verdicts`));

  const table = el(doc, "table", "accuracy");
  const head = el(doc, "tr");
  head.append(
    el(doc, "th", undefined, "Annotation"),
    el(doc, "th", undefined, "Correct"),
    el(doc, "th", undefined, "Accuracy %"),
  );
  table.append(head);
  for (const row of [...vm.rows, vm.overall]) {
    const tr = el(doc, "tr", "accuracy-row");
    tr.dataset.dimension = row.dimension;
    tr.append(
      el(doc, "td", "label", row.label),
      el(doc, "td", "counts", row.counts),
      el(doc, "td", "pct", row.display),
    );
    table.append(tr);
  }
  container.append(table);
}

/** One-shot banner slipped above an already rendered screen. */
export function renderNotice(container: HTMLElement, message: string): void {
  const banner = el(container.ownerDocument, "div", "notice", message);
  container.prepend(banner);
}

export function renderError(container: HTMLElement, message: string, onRetry: () => void): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  const banner = el(doc, "div", "error-banner");
  banner.append(el(doc, "p", "error-message", message));
  const retry = el(doc, "button", "retry", "Retry");
  retry.addEventListener("click", () => onRetry());
  banner.append(retry);
  container.append(banner);
}
