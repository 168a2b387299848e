/**
 * Browser wiring of the annotation workbench: labeling view with per-family
 * checkbox groups (digit keys 1-8 expand a family), the explore-table view,
 * and the stats view. All state transitions live in session/tableView; this
 * file only renders them and forwards DOM events.
 */

import { ApiClient } from "./client.js";
import { canMerge } from "./merge.js";
import { AnnotationSession, VersionSkew } from "./session.js";
import { TableExplorer } from "./tableView.js";
import type { UnitSummary } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  node.append(...children);
  return node;
}

export class Workbench {
  private session: AnnotationSession | null = null;
  private explorer: TableExplorer | null = null;
  private selectedForMerge = new Set<string>();
  private allUnits: UnitSummary[] = [];

  constructor(
    private readonly root: HTMLElement,
    private readonly client: ApiClient,
  ) {}

  async start(corpusId: string, annotatorId: string): Promise<void> {
    this.session = await AnnotationSession.open(
      this.client,
      corpusId,
      annotatorId,
      window.localStorage,
    );
    this.allUnits = await this.client.units(corpusId);
    document.addEventListener("keydown", (event) => this.onKey(event));
    this.render();
  }

  private onKey(event: KeyboardEvent): void {
    const digit = Number.parseInt(event.key, 10);
    if (digit >= 1 && digit <= 8) {
      const details = this.root.querySelectorAll<HTMLDetailsElement>("details.family");
      const target = details[digit - 1];
      if (target) target.open = !target.open;
    }
  }

  private render(): void {
    const session = this.session;
    if (!session) return;
    this.root.replaceChildren();

    if (session.skewBanner) {
      const banner = el(
        "div",
        { class: "skew-banner", role: "alert" },
        `Server taxonomy changed (snapshot ${session.snapshot.version}). Labeling is paused. `,
      );
      const refresh = el("button", {}, "Refresh snapshot");
      refresh.addEventListener("click", () => {
        void session.refreshSnapshot().then(() => this.render());
      });
      banner.append(refresh);
      this.root.append(banner);
    }

    const unit = session.currentUnit;
    if (!unit) {
      this.root.append(el("p", { class: "done" }, "Queue empty: every unit is labeled."));
      void this.renderTable();
      return;
    }

    this.root.append(
      el("header", {},
        el("span", { class: "position" }, `${session.cursor + 1} / ${session.queue.length}`),
        el("blockquote", { class: "unit-text" }, unit.text),
      ),
    );

    const families = el("div", { class: "families" });
    session.groupsInTableOrder().forEach((group, index) => {
      const details = el("details", { class: "family", "data-group": group.id });
      details.append(
        el("summary", {}, `${index + 1}. ${group.name}`, el("small", {}, ` ${group.description}`)),
      );
      for (const type of session.typesOfGroup(group.id)) {
        const checkbox = el("input", { type: "checkbox", "data-type": type.id }) as HTMLInputElement;
        checkbox.checked = session.pending.has(type.id);
        checkbox.addEventListener("change", () => {
          session.toggle(type.id);
          this.render();
        });
        const example = type.examples[0];
        details.append(
          el("label", { class: "type", title: type.definition },
            checkbox,
            el("span", { class: "type-name" }, type.name),
            el("span", { class: "type-help" },
              el("em", {}, type.definition),
              example ? el("q", {}, example.text) : "",
            ),
          ),
        );
      }
      families.append(details);
    });
    this.root.append(families);

    const save = el("button", { class: "save" },
      session.pending.size ? `Save ${session.pending.size} labels` : "Save as unbiased");
    save.disabled = session.skewBanner;
    save.addEventListener("click", () => {
      void session
        .save()
        .then(() => this.render())
        .catch((err: unknown) => {
          if (err instanceof VersionSkew) this.render();
          else this.showError(err);
        });
    });
    const skip = el("button", {}, "Skip");
    skip.addEventListener("click", () => {
      session.advance();
      this.render();
    });
    this.root.append(el("footer", {}, save, skip));
    this.renderMergeControl();
    void this.renderTable();
  }

  /** Shown only when adjacent unlabeled units are multi-selected. */
  private renderMergeControl(): void {
    const session = this.session;
    if (!session) return;
    const check = canMerge(this.allUnits, [...this.selectedForMerge]);
    if (!check.eligible) return;
    const button = el("button", { class: "merge" }, `Merge ${this.selectedForMerge.size} units`);
    button.addEventListener("click", () => {
      void this.client
        .mergeUnits(session.corpusId, [...this.selectedForMerge])
        .then(async () => {
          this.selectedForMerge.clear();
          this.allUnits = await this.client.units(session.corpusId);
          await session.reloadQueue();
          this.render();
        })
        .catch((err: unknown) => this.showError(err));
    });
    this.root.append(button);
  }

  toggleMergeSelection(unitId: string): void {
    if (this.selectedForMerge.has(unitId)) this.selectedForMerge.delete(unitId);
    else this.selectedForMerge.add(unitId);
    this.render();
  }

  private async renderTable(): Promise<void> {
    const session = this.session;
    if (!session) return;
    if (!this.explorer) {
      this.explorer = await TableExplorer.open(this.client, session.corpusId, session.snapshot);
    }
    const section = el("section", { class: "table-view" });
    if (this.explorer.state === "empty-corpus") {
      section.append(el("p", { class: "placeholder" }, "No corpus yet: ingest documents to see the table."));
      this.root.append(section);
      return;
    }
    const object = el("object", {
      type: "image/svg+xml",
      data: this.explorer.layoutUrl(),
      class: "bias-table",
    });
    object.addEventListener("load", () => {
      const doc = (object as HTMLObjectElement).contentDocument;
      doc?.querySelectorAll("g.cell").forEach((cell) => {
        cell.addEventListener("click", () => {
          const typeId = cell.getAttribute("data-type");
          if (typeId) void this.showTypePanel(typeId);
        });
      });
    });
    section.append(object, el("div", { class: "type-panel" }));
    this.root.append(section);
  }

  private async showTypePanel(typeId: string): Promise<void> {
    if (!this.explorer) return;
    const selection = await this.explorer.selectType(typeId);
    const panel = this.root.querySelector(".type-panel");
    if (!panel) return;
    panel.replaceChildren(
      el("h3", {}, selection.type.name),
      el("p", {}, selection.type.definition),
      el("ul", {},
        ...selection.units.map((u) => el("li", { "data-unit": u.id }, u.text)),
      ),
      selection.units.length === 0 ? el("p", { class: "placeholder" }, "No units carry this type.") : "",
    );
  }

  private showError(err: unknown): void {
    const box = el("div", { class: "error", role: "alert" }, String(err));
    this.root.prepend(box);
  }
}

declare global {
  interface Window {
    biasWorkbench?: Workbench;
  }
}

export function mount(): void {
  const params = new URLSearchParams(window.location.search);
  const base = params.get("api") ?? "http://127.0.0.1:8037";
  const corpus = params.get("corpus") ?? "c1";
  const annotator = params.get("annotator") ?? "annotator";
  const root = document.getElementById("workbench");
  if (!root) throw new Error("missing #workbench element");
  const workbench = new Workbench(root, new ApiClient(base));
  window.biasWorkbench = workbench;
  void workbench.start(corpus, annotator);
}

if (typeof document !== "undefined" && document.getElementById("workbench")) {
  mount();
}
