/**
 * Annotator session: the unlabeled queue, the pending (unsaved) label set
 * for the unit under the cursor, and taxonomy version-skew handling.
 *
 * Invariants kept here:
 * - pending labels are always a subset of the snapshot's type ids;
 * - the cursor stays inside the queue bounds;
 * - pending state is persisted on every change, so unsaved work survives
 *   a page reload;
 * - when the server's taxonomy version differs from the snapshot, saving
 *   is blocked behind a skew banner until the snapshot is refreshed.
 *
 * No statistic is ever computed client-side; every number shown comes
 * from a server endpoint.
 */

import { ApiClient, ApiError, NetworkError } from "./client.js";
import type { SavedAnnotation, TaxonomySnapshot, TaxonomyType, UnitSummary } from "./types.js";

/** localStorage-compatible subset, injectable for tests and non-browser use. */
export interface KeyValueStorage {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export class MemoryStorage implements KeyValueStorage {
  private map = new Map<string, string>();
  getItem(key: string): string | null {
    return this.map.has(key) ? this.map.get(key)! : null;
  }
  setItem(key: string, value: string): void {
    this.map.set(key, value);
  }
  removeItem(key: string): void {
    this.map.delete(key);
  }
}

export class VersionSkew extends Error {
  constructor(readonly snapshotVersion: string, readonly serverVersion: string) {
    super(`taxonomy version skew: snapshot ${snapshotVersion}, server ${serverVersion}`);
    this.name = "VersionSkew";
  }
}

function pendingKey(corpusId: string, annotatorId: string, unitId: string): string {
  return `bias-ui:pending:${corpusId}:${annotatorId}:${unitId}`;
}

export class AnnotationSession {
  queue: UnitSummary[] = [];
  cursor = 0;
  pending = new Set<string>();
  pendingNote: string | null = null;
  skewBanner = false;

  private constructor(
    readonly client: ApiClient,
    readonly corpusId: string,
    readonly annotatorId: string,
    public snapshot: TaxonomySnapshot,
    private readonly storage: KeyValueStorage,
  ) {}

  /** Load the snapshot and the annotator's unlabeled queue, restoring any unsaved labels. */
  static async open(
    client: ApiClient,
    corpusId: string,
    annotatorId: string,
    storage: KeyValueStorage = new MemoryStorage(),
  ): Promise<AnnotationSession> {
    const snapshot = await client.taxonomy();
    const session = new AnnotationSession(client, corpusId, annotatorId, snapshot, storage);
    await session.reloadQueue();
    return session;
  }

  async reloadQueue(): Promise<void> {
    this.queue = await this.client.units(this.corpusId, {
      filter: "unlabeled",
      annotator: this.annotatorId,
    });
    this.cursor = this.queue.length ? Math.min(this.cursor, this.queue.length - 1) : 0;
    this.checkSkew();
    this.restorePending();
  }

  get currentUnit(): UnitSummary | null {
    return this.queue[this.cursor] ?? null;
  }

  get typeIds(): Set<string> {
    return new Set(this.snapshot.types.map((t) => t.id));
  }

  /** Families in table order; checkbox groups mirror this. */
  groupsInTableOrder() {
    return this.snapshot.groups;
  }

  typesOfGroup(groupId: string): TaxonomyType[] {
    return this.snapshot.types.filter((t) => t.group === groupId);
  }

  /** Flip one label on the pending set. Unknown ids are refused, keeping
   * pending inside the snapshot. Returns the new membership state. */
  toggle(typeId: string): boolean {
    if (!this.typeIds.has(typeId)) {
      throw new RangeError(`type ${typeId} is not part of taxonomy ${this.snapshot.version}`);
    }
    if (this.pending.has(typeId)) {
      this.pending.delete(typeId);
    } else {
      this.pending.add(typeId);
    }
    this.persistPending();
    return this.pending.has(typeId);
  }

  advance(): void {
    if (this.cursor < this.queue.length - 1) {
      this.cursor += 1;
      this.restorePending();
    }
  }

  retreat(): void {
    if (this.cursor > 0) {
      this.cursor -= 1;
      this.restorePending();
    }
  }

  /**
   * Save the pending set for the current unit (an empty set is an explicit
   * "unbiased" judgment). On success the unit leaves the queue and the
   * pending state is cleared. Version skew, reported by the server or
   * detected locally, raises VersionSkew, flips the banner, and blocks
   * labeling until refreshSnapshot(); network failures keep the pending
   * state (already persisted) untouched.
   */
  async save(): Promise<SavedAnnotation> {
    const unit = this.currentUnit;
    if (!unit) {
      throw new RangeError("queue is empty; nothing to save");
    }
    if (this.skewBanner) {
      throw new VersionSkew(this.snapshot.version, this.client.lastServerVersion ?? "unknown");
    }
    let saved: SavedAnnotation;
    try {
      saved = await this.client.saveAnnotation({
        corpus_id: this.corpusId,
        unit_id: unit.id,
        annotator_id: this.annotatorId,
        type_ids: [...this.pending].sort(),
        note: this.pendingNote,
        taxonomy_version: this.snapshot.version,
      });
    } catch (err) {
      if (err instanceof ApiError && err.code === "StaleTaxonomyVersion") {
        this.skewBanner = true;
        throw new VersionSkew(this.snapshot.version, err.taxonomyVersion ?? "unknown");
      }
      if (err instanceof NetworkError) {
        // pending already persisted; surface the failure, lose nothing
        throw err;
      }
      throw err;
    }
    this.checkSkew();
    this.clearPending(unit.id);
    this.queue.splice(this.cursor, 1);
    if (this.cursor >= this.queue.length && this.cursor > 0) {
      this.cursor = this.queue.length - 1;
    }
    this.restorePending();
    return saved;
  }

  /** Reload the taxonomy snapshot and clear the banner; pending ids that do
   * not exist in the new snapshot are dropped to restore the invariant. */
  async refreshSnapshot(): Promise<void> {
    this.snapshot = await this.client.taxonomy();
    const known = this.typeIds;
    for (const id of [...this.pending]) {
      if (!known.has(id)) this.pending.delete(id);
    }
    this.persistPending();
    this.skewBanner = this.client.lastServerVersion !== null
      && this.client.lastServerVersion !== this.snapshot.version;
  }

  /** Compare the snapshot against the newest server-reported version. */
  checkSkew(): boolean {
    const server = this.client.lastServerVersion;
    if (server !== null && server !== this.snapshot.version) {
      this.skewBanner = true;
    }
    return this.skewBanner;
  }

  private persistPending(): void {
    const unit = this.currentUnit;
    if (!unit) return;
    const key = pendingKey(this.corpusId, this.annotatorId, unit.id);
    if (this.pending.size === 0 && this.pendingNote === null) {
      this.storage.removeItem(key);
    } else {
      this.storage.setItem(
        key,
        JSON.stringify({ type_ids: [...this.pending].sort(), note: this.pendingNote }),
      );
    }
  }

  private restorePending(): void {
    this.pending = new Set();
    this.pendingNote = null;
    const unit = this.currentUnit;
    if (!unit) return;
    const raw = this.storage.getItem(pendingKey(this.corpusId, this.annotatorId, unit.id));
    if (!raw) return;
    try {
      const parsed = JSON.parse(raw) as { type_ids?: string[]; note?: string | null };
      const known = this.typeIds;
      for (const id of parsed.type_ids ?? []) {
        if (known.has(id)) this.pending.add(id);
      }
      this.pendingNote = parsed.note ?? null;
    } catch {
      this.storage.removeItem(pendingKey(this.corpusId, this.annotatorId, unit.id));
    }
  }

  private clearPending(unitId: string): void {
    this.storage.removeItem(pendingKey(this.corpusId, this.annotatorId, unitId));
    this.pending = new Set();
    this.pendingNote = null;
  }
}
