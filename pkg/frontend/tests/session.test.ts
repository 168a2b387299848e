import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient, NetworkError } from "../src/client.js";
import { AnnotationSession, MemoryStorage, VersionSkew } from "../src/session.js";
import { FakeServer } from "./fakeServer.js";

let server: FakeServer;
let client: ApiClient;
let storage: MemoryStorage;

beforeEach(() => {
  server = new FakeServer();
  client = new ApiClient("http://fake.test", server.fetch);
  storage = new MemoryStorage();
});

function open() {
  return AnnotationSession.open(client, "c1", "ann1", storage);
}

describe("queue loading", () => {
  it("loads the unlabeled queue for the annotator", async () => {
    const session = await open();
    expect(session.queue.map((u) => u.id)).toEqual(["doc:s0", "doc:s1", "doc:s2"]);
    expect(session.cursor).toBe(0);
    expect(session.currentUnit?.text).toBe("First unit.");
  });

  it("excludes units the annotator already labeled", async () => {
    const first = await open();
    first.toggle("word-choice");
    await first.save();

    const second = await AnnotationSession.open(client, "c1", "ann1", new MemoryStorage());
    expect(second.queue.map((u) => u.id)).toEqual(["doc:s1", "doc:s2"]);
  });

  it("keeps the cursor inside bounds when advancing and retreating", async () => {
    const session = await open();
    session.retreat();
    expect(session.cursor).toBe(0);
    session.advance();
    session.advance();
    session.advance(); // already at the end
    expect(session.cursor).toBe(2);
  });
});

describe("pending labels", () => {
  it("toggles only snapshot type ids", async () => {
    const session = await open();
    expect(session.toggle("word-choice")).toBe(true);
    expect(session.toggle("word-choice")).toBe(false);
    expect(() => session.toggle("loaded-language")).toThrow(RangeError);
    expect([...session.pending]).toEqual([]);
  });

  it("persists pending labels per unit and restores them after a reload", async () => {
    const session = await open();
    session.toggle("word-choice");
    session.toggle("magnitude");

    // "reload": a fresh session over the same storage
    const reloaded = await AnnotationSession.open(client, "c1", "ann1", storage);
    expect([...reloaded.pending].sort()).toEqual(["magnitude", "word-choice"]);
  });

  it("keeps pending state when the network fails mid-save", async () => {
    const session = await open();
    session.toggle("word-choice");
    server.offline = true;
    await expect(session.save()).rejects.toBeInstanceOf(NetworkError);
    expect([...session.pending]).toEqual(["word-choice"]);

    server.offline = false;
    const recovered = await AnnotationSession.open(client, "c1", "ann1", storage);
    expect([...recovered.pending]).toEqual(["word-choice"]);
    await recovered.save(); // the retained work saves cleanly afterwards
    expect(server.records.get("doc:s0")?.get("ann1")?.type_ids).toEqual(["word-choice"]);
  });

  it("tracks pending sets separately per unit", async () => {
    const session = await open();
    session.toggle("word-choice");
    session.advance();
    expect(session.pending.size).toBe(0);
    session.toggle("vagueness");
    session.retreat();
    expect([...session.pending]).toEqual(["word-choice"]);
  });
});

describe("saving", () => {
  it("saves a two-label record and advances the queue", async () => {
    const session = await open();
    session.toggle("word-choice");
    session.toggle("magnitude");
    const saved = await session.save();
    expect(saved.type_ids).toEqual(["magnitude", "word-choice"]);
    expect(session.queue.map((u) => u.id)).toEqual(["doc:s1", "doc:s2"]);
    expect(session.pending.size).toBe(0);
    expect(session.currentUnit?.id).toBe("doc:s1");
  });

  it("round-trips: the saved record is visible on reload", async () => {
    const session = await open();
    session.toggle("word-choice");
    session.toggle("magnitude");
    await session.save();

    const units = await client.units("c1", { annotator: "ann1" });
    expect(units[0]?.record?.type_ids).toEqual(["magnitude", "word-choice"]);
  });

  it("saving with no toggles records an explicit unbiased judgment", async () => {
    const session = await open();
    const saved = await session.save();
    expect(saved.type_ids).toEqual([]);
    expect(server.records.get("doc:s0")?.get("ann1")?.type_ids).toEqual([]);
  });

  it("clamps the cursor after saving the last unit", async () => {
    const session = await open();
    session.advance();
    session.advance();
    await session.save();
    expect(session.cursor).toBe(1);
    expect(session.currentUnit?.id).toBe("doc:s1");
  });

  it("throws on an empty queue", async () => {
    const session = await open();
    await session.save();
    await session.save();
    await session.save();
    expect(session.currentUnit).toBeNull();
    await expect(session.save()).rejects.toThrow(RangeError);
  });
});

describe("version skew", () => {
  it("raises the banner and blocks labeling when the server restarts on a new version", async () => {
    const session = await open();
    session.toggle("word-choice");
    server.restartWithVersion("2.0.0");

    await expect(session.save()).rejects.toBeInstanceOf(VersionSkew);
    expect(session.skewBanner).toBe(true);
    // still blocked before any refresh, without another request
    const requests = server.requestLog.length;
    await expect(session.save()).rejects.toBeInstanceOf(VersionSkew);
    expect(server.requestLog.length).toBe(requests);
    // pending work was not lost
    expect([...session.pending]).toEqual(["word-choice"]);
  });

  it("refreshSnapshot clears the banner and allows saving again", async () => {
    const session = await open();
    session.toggle("word-choice");
    server.restartWithVersion("2.0.0");
    await expect(session.save()).rejects.toBeInstanceOf(VersionSkew);

    await session.refreshSnapshot();
    expect(session.snapshot.version).toBe("2.0.0");
    expect(session.skewBanner).toBe(false);
    const saved = await session.save();
    expect(saved.type_ids).toEqual(["word-choice"]);
  });

  it("drops pending ids that vanished from the refreshed snapshot", async () => {
    const session = await open();
    session.toggle("magnitude");
    server.restartWithVersion("2.0.0");
    server.taxonomy.types = server.taxonomy.types.filter((t) => t.id !== "magnitude");
    await session.refreshSnapshot();
    expect(session.pending.has("magnitude")).toBe(false);
  });
});
