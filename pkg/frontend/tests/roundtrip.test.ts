/**
 * Round-trip against a live labeling service: the workbench fetches pairs,
 * submits all five labels plus a skip across six pairs, progress matches
 * the server, and consensus appears in the export once a second rater
 * agrees. Spawns the Python service as a subprocess.
 */
import { type ChildProcess, spawn } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { Workbench } from "../src/controller.js";
import { CLONE_LABELS, type CloneLabel } from "../src/types.js";

const PORT = 18_640 + (process.pid % 1000);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
let labelsPath: string;

async function waitForServer(timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`${BASE}/api/progress`);
      if (resp.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error("labeling service did not come up");
}

beforeAll(async () => {
  labelsPath = join(mkdtempSync(join(tmpdir(), "labels-")), "labels.jsonl");
  server = spawn(
    "python3",
    [join(__dirname, "fixture_server.py"), "--port", String(PORT), "--labels", labelsPath],
    { stdio: "inherit" },
  );
  await waitForServer();
}, 40_000);

afterAll(() => {
  server?.kill();
});

describe("labeling round-trip", () => {
  it("labels six pairs (five labels + skip), matches server progress, reaches consensus", async () => {
    const api = new ApiClient(BASE);
    const bench = new Workbench(api, "ui-rater");
    await bench.start();
    expect(bench.getState().phase).toBe("showing");
    expect(bench.getState().progress).toEqual({
      total: 6,
      labeled: 0,
      consensus: 0,
      remaining: 6,
    });

    // five labels and one skip across the six pairs
    const labeled: Array<{ pairId: string; label: CloneLabel }> = [];
    for (const label of CLONE_LABELS) {
      const pairId = bench.getState().pair!.pair_id;
      await bench.submit(label);
      labeled.push({ pairId, label });
    }
    expect(bench.getState().phase).toBe("showing");
    await bench.skip();
    expect(bench.getState().phase).toBe("exhausted");
    expect(bench.getState().submitted).toBe(6);

    // client progress equals server progress
    const serverProgress = await api.progress();
    expect(bench.getState().progress).toEqual(serverProgress);
    expect(serverProgress.labeled).toBe(5); // the skip is not a label
    expect(serverProgress.consensus).toBe(0);

    // duplicate click on a second rater's first pair: one stored record
    const peer = new Workbench(api, "peer-rater");
    await peer.start();
    const peerPair = peer.getState().pair!.pair_id;
    const agreed = labeled.find((l) => l.pairId === peerPair)?.label ?? "Type1";
    const clickOne = peer.submit(agreed);
    const clickTwo = peer.submit(agreed); // same tick: must be dropped
    await Promise.all([clickOne, clickTwo]);
    const journal = readFileSync(labelsPath, "utf-8")
      .trim()
      .split("\n")
      .map((line) => JSON.parse(line));
    const peerRecords = journal.filter(
      (row) => row.rater === "peer-rater" && row.pair_id === peerPair && row.kind === "label",
    );
    expect(peerRecords).toHaveLength(1);

    // second rater agrees on every remaining labeled pair -> consensus grows
    while (peer.getState().phase === "showing") {
      const pairId = peer.getState().pair!.pair_id;
      const match = labeled.find((l) => l.pairId === pairId);
      if (match) {
        await peer.submit(match.label);
      } else {
        await peer.skip(); // the pair ui-rater skipped
      }
    }
    const finalProgress = await api.progress();
    expect(finalProgress.consensus).toBe(5);

    const exported = await api.exportTruth();
    const rows = exported
      .trim()
      .split("\n")
      .map((line) => JSON.parse(line));
    expect(rows).toHaveLength(5);
    const byPair = new Map(rows.map((r) => [r.pair_id, r.consensus_label]));
    for (const { pairId, label } of labeled) {
      expect(byPair.get(pairId)).toBe(label);
    }
    for (const row of rows) {
      expect(row.supporting_raters).toBe(2);
    }
  }, 60_000);
});
