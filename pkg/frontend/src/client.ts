/**
 * Typed fetch client for the annotation service.
 *
 * Every response body carries `taxonomy_version`; the client remembers the
 * last value it saw so sessions can detect version skew against their
 * snapshot. Server errors arrive as `{error, detail, taxonomy_version}`
 * and surface as ApiError with the module error name as `code`.
 */

import type {
  AgreementReport,
  DocumentIn,
  MergedUnit,
  SavedAnnotation,
  StatsReport,
  TaxonomySnapshot,
  UnitSummary,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    readonly detail: string,
    readonly taxonomyVersion: string | null,
  ) {
    super(`${code} (${status}): ${detail}`);
    this.name = "ApiError";
  }
}

/** Network-level failure (server unreachable, fetch rejected). */
export class NetworkError extends Error {
  constructor(cause: unknown) {
    super(`request failed: ${String(cause)}`);
    this.name = "NetworkError";
  }
}

export interface UnitFilter {
  filter?: "unlabeled";
  annotator?: string;
  type?: string;
}

export class ApiClient {
  lastServerVersion: string | null = null;

  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    } catch (cause) {
      throw new NetworkError(cause);
    }
    let body: unknown = null;
    try {
      body = await response.json();
    } catch {
      // non-JSON body; fall through to the status check
    }
    const record = (body ?? {}) as Record<string, unknown>;
    if (typeof record.taxonomy_version === "string") {
      this.lastServerVersion = record.taxonomy_version;
    }
    if (!response.ok) {
      throw new ApiError(
        response.status,
        typeof record.error === "string" ? record.error : "HttpError",
        typeof record.detail === "string" ? record.detail : response.statusText,
        this.lastServerVersion,
      );
    }
    return body as T;
  }

  async taxonomy(): Promise<TaxonomySnapshot> {
    const body = await this.request<{ taxonomy: TaxonomySnapshot }>("/taxonomy");
    return body.taxonomy;
  }

  async units(corpusId: string, filter: UnitFilter = {}): Promise<UnitSummary[]> {
    const params = new URLSearchParams();
    if (filter.filter) params.set("filter", filter.filter);
    if (filter.annotator) params.set("annotator", filter.annotator);
    if (filter.type) params.set("type", filter.type);
    const query = params.toString();
    const body = await this.request<{ units: UnitSummary[] }>(
      `/corpora/${encodeURIComponent(corpusId)}/units${query ? `?${query}` : ""}`,
    );
    return body.units;
  }

  saveAnnotation(body: {
    corpus_id: string;
    unit_id: string;
    annotator_id: string;
    type_ids: string[];
    note?: string | null;
    taxonomy_version?: string;
  }): Promise<SavedAnnotation> {
    return this.request<SavedAnnotation>("/annotations", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  stats(corpusId: string, consensus: "union" | "majority" = "union", k = 2): Promise<StatsReport> {
    return this.request<StatsReport>(
      `/stats/${encodeURIComponent(corpusId)}?consensus=${consensus}&k=${k}`,
    );
  }

  agreement(corpusId: string, a: string, b: string): Promise<AgreementReport> {
    const params = new URLSearchParams({ a, b });
    return this.request<AgreementReport>(
      `/agreement/${encodeURIComponent(corpusId)}?${params}`,
    );
  }

  async mergeUnits(corpusId: string, unitIds: string[]): Promise<MergedUnit> {
    const body = await this.request<{ unit: MergedUnit }>("/units/merge", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ corpus_id: corpusId, unit_ids: unitIds }),
    });
    return body.unit;
  }

  ingest(corpusId: string, documents: DocumentIn[]): Promise<{ total_units: number }> {
    return this.request<{ total_units: number }>("/corpora", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ corpus_id: corpusId, documents }),
    });
  }

  /** URL of the rendered table; the view embeds it instead of recomputing anything. */
  layoutUrl(corpusId: string, consensus: "union" | "majority" = "union"): string {
    return `${this.baseUrl}/layout.svg?corpus=${encodeURIComponent(corpusId)}&consensus=${consensus}`;
  }
}
