/**
 * In-memory stand-in for the annotation service, faithful to the wire
 * contract the real server exposes: every body carries taxonomy_version,
 * errors come back as {error, detail, taxonomy_version}, version-skewed
 * annotation posts are rejected with StaleTaxonomyVersion, and the
 * unlabeled/type filters behave like the server's.
 */

import type { FetchLike } from "../src/client.js";
import type { TaxonomySnapshot, UnitRecord, UnitSummary } from "../src/types.js";

export const TEST_TAXONOMY: TaxonomySnapshot = {
  version: "1.0.0",
  groups: [
    { id: "framing", name: "Framing", description: "presentation", color: "#4e79a7" },
    { id: "asserting", name: "Asserting", description: "claiming", color: "#f28e2b" },
  ],
  types: [
    {
      id: "word-choice",
      name: "Word Choice Bias",
      group: "framing",
      definition: "connoted wording",
      examples: [{ text: "Hordes swarmed the island.", language: "original", source_note: null }],
      notes: "",
    },
    {
      id: "magnitude",
      name: "Magnitude Bias",
      group: "framing",
      definition: "exaggeration or downplaying",
      examples: [{ text: "The worst law of all time!", language: "original", source_note: null }],
      notes: "",
    },
    {
      id: "vagueness",
      name: "Vagueness Bias",
      group: "asserting",
      definition: "unspecific phrasing",
      examples: [{ text: "Experts condemn it.", language: "original", source_note: null }],
      notes: "",
    },
  ],
  tiers: [
    { name: "very_high", label: "Very high", min_percent: 25, stated_min: 25, stated_max: null },
    { name: "high", label: "High", min_percent: 15, stated_min: 15, stated_max: 24 },
    { name: "medium", label: "Medium", min_percent: 8, stated_min: 8, stated_max: 14 },
    { name: "low", label: "Low", min_percent: 5, stated_min: 5, stated_max: 7 },
    { name: "very_low", label: "Very low", min_percent: 0, stated_min: 1, stated_max: 4 },
  ],
};

interface StoredRecord extends UnitRecord {
  annotator_id: string;
}

export class FakeServer {
  version = "1.0.0";
  taxonomy: TaxonomySnapshot = structuredClone(TEST_TAXONOMY);
  units: UnitSummary[] = [];
  records = new Map<string, Map<string, StoredRecord>>(); // unit -> annotator -> record
  requestLog: string[] = [];
  offline = false;
  corpusId = "c1";

  constructor(unitTexts: string[] = ["First unit.", "Second unit.", "Third unit."]) {
    let offset = 0;
    this.units = unitTexts.map((text, i) => {
      const unit: UnitSummary = {
        id: `doc:s${i}`,
        document_id: "doc",
        start: offset,
        end: offset + text.length,
        text,
        merged_from: null,
        record: null,
      };
      offset += text.length + 1;
      return unit;
    });
  }

  /** Simulate a server restart onto a new taxonomy version. */
  restartWithVersion(version: string): void {
    this.version = version;
    this.taxonomy = { ...structuredClone(this.taxonomy), version };
  }

  private json(status: number, body: Record<string, unknown>): Response {
    return new Response(JSON.stringify({ taxonomy_version: this.version, ...body }), {
      status,
      headers: { "content-type": "application/json" },
    });
  }

  private error(status: number, code: string, detail: string): Response {
    return this.json(status, { error: code, detail });
  }

  fetch: FetchLike = async (input, init) => {
    if (this.offline) throw new TypeError("fetch failed: connection refused");
    const url = new URL(input, "http://fake.test");
    const method = init?.method ?? "GET";
    this.requestLog.push(`${method} ${url.pathname}${url.search}`);

    if (method === "GET" && url.pathname === "/taxonomy") {
      return this.json(200, { taxonomy: this.taxonomy, valid: true });
    }

    if (method === "GET" && url.pathname.startsWith("/corpora/")) {
      const corpus = decodeURIComponent(url.pathname.split("/")[2] ?? "");
      if (corpus !== this.corpusId) return this.error(404, "NotFound", `unknown corpus '${corpus}'`);
      let out = this.units.map((u) => ({ ...u }));
      const annotator = url.searchParams.get("annotator");
      if (url.searchParams.get("filter") === "unlabeled") {
        out = out.filter((u) => {
          const per = this.records.get(u.id);
          if (!per) return true;
          return annotator ? !per.has(annotator) : per.size === 0;
        });
      }
      const type = url.searchParams.get("type");
      if (type) {
        out = out.filter((u) => {
          const per = this.records.get(u.id);
          if (!per) return false;
          return [...per.values()].some((r) => r.type_ids.includes(type));
        });
      }
      for (const u of out) {
        const rec = annotator ? this.records.get(u.id)?.get(annotator) : undefined;
        u.record = rec ? { type_ids: rec.type_ids, timestamp: rec.timestamp, note: rec.note } : null;
      }
      return this.json(200, { corpus_id: corpus, units: out });
    }

    if (method === "GET" && url.pathname.startsWith("/stats/")) {
      const corpus = decodeURIComponent(url.pathname.split("/")[2] ?? "");
      if (corpus !== this.corpusId) return this.error(404, "NotFound", `unknown corpus '${corpus}'`);
      return this.json(200, {
        total_units: this.units.length,
        groups: [{ group: "framing", name: "Framing", unit_count: 2, percent: 68.39 }],
        types: [],
        boundary_flags: [],
      });
    }

    if (method === "POST" && url.pathname === "/annotations") {
      const body = JSON.parse(String(init?.body)) as {
        corpus_id: string;
        unit_id: string;
        annotator_id: string;
        type_ids: string[];
        note?: string | null;
        taxonomy_version?: string;
      };
      if (body.corpus_id !== this.corpusId) {
        return this.error(404, "NotFound", `unknown corpus '${body.corpus_id}'`);
      }
      if (!this.units.some((u) => u.id === body.unit_id)) {
        return this.error(404, "UnknownUnit", `unit '${body.unit_id}' is not in the corpus`);
      }
      const known = new Set(this.taxonomy.types.map((t) => t.id));
      const bad = body.type_ids.filter((t) => !known.has(t));
      if (bad.length) return this.error(400, "UnknownType", `unknown bias type ids: ${bad.join(", ")}`);
      if (body.taxonomy_version && body.taxonomy_version !== this.version) {
        return this.error(
          400,
          "StaleTaxonomyVersion",
          `record carries taxonomy '${body.taxonomy_version}', store uses '${this.version}'`,
        );
      }
      const per = this.records.get(body.unit_id) ?? new Map<string, StoredRecord>();
      const record: StoredRecord = {
        annotator_id: body.annotator_id,
        type_ids: [...body.type_ids].sort(),
        timestamp: "2025-06-01T00:00:00+00:00",
        note: body.note ?? null,
      };
      per.set(body.annotator_id, record);
      this.records.set(body.unit_id, per);
      return this.json(200, {
        unit_id: body.unit_id,
        annotator_id: body.annotator_id,
        type_ids: record.type_ids,
        timestamp: record.timestamp,
      });
    }

    if (method === "POST" && url.pathname === "/units/merge") {
      const body = JSON.parse(String(init?.body)) as { corpus_id: string; unit_ids: string[] };
      const selected = this.units.filter((u) => body.unit_ids.includes(u.id));
      if (selected.length !== body.unit_ids.length) {
        return this.error(404, "NotFound", "unknown unit id");
      }
      const merged: UnitSummary = {
        id: "doc:m1",
        document_id: "doc",
        start: Math.min(...selected.map((u) => u.start)),
        end: Math.max(...selected.map((u) => u.end)),
        text: selected.map((u) => u.text).join(" "),
        merged_from: selected.map((u) => u.id),
        record: null,
      };
      const first = this.units.findIndex((u) => u.id === selected[0]!.id);
      this.units = this.units.filter((u) => !body.unit_ids.includes(u.id));
      this.units.splice(first, 0, merged);
      return this.json(200, { unit: merged });
    }

    return this.error(404, "NotFound", `no route for ${method} ${url.pathname}`);
  };
}
