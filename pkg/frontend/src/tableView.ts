/**
 * Explore-table state: embeds the server-rendered table SVG and turns a
 * cell click into a server-side type filter over the unit list, paired
 * with the clicked type's definition and examples from the snapshot.
 *
 * For an absent corpus the view settles into a placeholder after a single
 * attempt; it never loops retrying.
 */

import { ApiClient, ApiError } from "./client.js";
import type { StatsReport, TaxonomySnapshot, TaxonomyType, UnitSummary } from "./types.js";

export type TableState = "ready" | "empty-corpus";

export interface TypeSelection {
  type: TaxonomyType;
  units: UnitSummary[];
}

export class TableExplorer {
  private constructor(
    readonly client: ApiClient,
    readonly corpusId: string,
    readonly snapshot: TaxonomySnapshot,
    readonly state: TableState,
    readonly stats: StatsReport | null,
  ) {}

  /** One stats request decides between a live table and the placeholder. */
  static async open(
    client: ApiClient,
    corpusId: string,
    snapshot: TaxonomySnapshot,
  ): Promise<TableExplorer> {
    try {
      const stats = await client.stats(corpusId, "union");
      return new TableExplorer(client, corpusId, snapshot, "ready", stats);
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) {
        return new TableExplorer(client, corpusId, snapshot, "empty-corpus", null);
      }
      throw err;
    }
  }

  layoutUrl(): string {
    return this.client.layoutUrl(this.corpusId);
  }

  /**
   * Cell click: fetch the units carrying the type (server-side filter) and
   * return them with the type's definition panel data. A zero-count type
   * yields an empty list but still shows the definition.
   */
  async selectType(typeId: string): Promise<TypeSelection> {
    const type = this.snapshot.types.find((t) => t.id === typeId);
    if (!type) {
      throw new RangeError(`type ${typeId} is not part of taxonomy ${this.snapshot.version}`);
    }
    if (this.state !== "ready") {
      return { type, units: [] };
    }
    const units = await this.client.units(this.corpusId, { type: typeId });
    return { type, units };
  }
}
