import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/client.js";
import { TableExplorer } from "../src/tableView.js";
import { FakeServer, TEST_TAXONOMY } from "./fakeServer.js";

let server: FakeServer;
let client: ApiClient;

beforeEach(() => {
  server = new FakeServer();
  client = new ApiClient("http://fake.test", server.fetch);
});

describe("TableExplorer", () => {
  it("opens ready when stats exist and exposes the layout URL", async () => {
    const view = await TableExplorer.open(client, "c1", TEST_TAXONOMY);
    expect(view.state).toBe("ready");
    expect(view.stats?.groups[0]?.percent).toBe(68.39);
    expect(view.layoutUrl()).toContain("/layout.svg?corpus=c1");
  });

  it("clicking a cell filters units server-side and pairs them with the definition", async () => {
    await client.saveAnnotation({
      corpus_id: "c1",
      unit_id: "doc:s1",
      annotator_id: "ann1",
      type_ids: ["word-choice"],
    });
    const view = await TableExplorer.open(client, "c1", TEST_TAXONOMY);
    const selection = await view.selectType("word-choice");
    expect(selection.units.map((u) => u.id)).toEqual(["doc:s1"]);
    expect(selection.type.definition).toBe("connoted wording");
    expect(server.requestLog.at(-1)).toContain("type=word-choice");
  });

  it("zero-count types return an empty list with the definition panel intact", async () => {
    const view = await TableExplorer.open(client, "c1", TEST_TAXONOMY);
    const selection = await view.selectType("vagueness");
    expect(selection.units).toEqual([]);
    expect(selection.type.name).toBe("Vagueness Bias");
  });

  it("an absent corpus settles into the placeholder after one request, no retry loop", async () => {
    const view = await TableExplorer.open(client, "ghost", TEST_TAXONOMY);
    expect(view.state).toBe("empty-corpus");
    const requestsAfterOpen = server.requestLog.length;
    const selection = await view.selectType("word-choice");
    expect(selection.units).toEqual([]);
    expect(server.requestLog.length).toBe(requestsAfterOpen); // no further traffic
  });

  it("refuses type ids outside the snapshot", async () => {
    const view = await TableExplorer.open(client, "c1", TEST_TAXONOMY);
    await expect(view.selectType("loaded-language")).rejects.toThrow(RangeError);
  });
});
