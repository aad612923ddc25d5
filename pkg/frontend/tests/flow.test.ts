/**
 * Scripted end-to-end session: the real workbench DOM (jsdom) driving
 * the real engine over HTTP. Covers the full analysis loop: select
 * first/last note, operator button enablement with its badge, apply,
 * graph growth, the 280-character annotation boundary, and a non-empty
 * heatmap download.
 */

import { spawn, type ChildProcess } from "node:child_process";
import { cpSync, mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { Workbench } from "../src/app.js";

const PORT = 8861;
const BASE = `http://127.0.0.1:${PORT}`;
const FIXTURE = join(
  __dirname,
  "..",
  "..",
  "tests",
  "fixtures",
  "two_part_four_measures.musicxml",
);

let server: ChildProcess | null = null;
let workdir = "";

async function waitForServer(): Promise<void> {
  for (let attempt = 0; attempt < 60; attempt++) {
    try {
      const response = await fetch(`${BASE}/scores`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 500));
  }
  throw new Error("engine did not come up");
}

beforeAll(async () => {
  workdir = mkdtempSync(join(tmpdir(), "melodyscope-ui-"));
  const corpus = join(workdir, "corpus");
  cpSync(FIXTURE, join(corpus, "two_part_four_measures.musicxml"));
  server = spawn(
    "melodyscope",
    [
      "serve",
      "--corpus", corpus,
      "--sessions", join(workdir, "sessions"),
      "--port", String(PORT),
    ],
    { stdio: "ignore" },
  );
  await waitForServer();
});

afterAll(() => {
  server?.kill();
  if (workdir) rmSync(workdir, { recursive: true, force: true });
});

function clickNote(root: HTMLElement, index: number): void {
  const sheet = root.querySelector("[data-role='sheet']")!;
  const voice = sheet.querySelector("[data-voice='P1.v1']")!;
  const notes = voice.querySelectorAll("g.note");
  (notes[index] as SVGElement).dispatchEvent(
    new MouseEvent("click", { bubbles: true }),
  );
}

describe("workbench flow against the live engine", () => {
  it("runs the whole analysis loop", async () => {
    const root = document.createElement("div");
    document.body.append(root);
    const workbench = new Workbench(root, new ApiClient(BASE));
    await workbench.start();
    await workbench.whenIdle();

    // The fixture's first voice renders as clickable notes.
    expect(root.querySelectorAll("[data-voice='P1.v1'] g.note").length).toBeGreaterThan(0);

    // First click anchors; the hint appears and candidates highlight.
    clickNote(root, 0);
    expect(root.querySelector("[data-role='anchor-hint']")).not.toBeNull();
    expect(root.querySelectorAll(".notehead.candidate").length).toBeGreaterThan(0);

    // Second click on a later note of the same voice completes the selection.
    clickNote(root, 3);
    await workbench.whenIdle();
    expect(workbench.state.selectionAnchor).toBeNull();
    expect(workbench.state.activeNode).toBe("n1");

    // Measure 1 (C5 B4 A4 G4) recurs transposed in measure 2: O1 enabled
    // with badge 1, O8 enabled (the selection itself).
    const o1 = root.querySelector("button[data-operator='O1']") as HTMLButtonElement;
    expect(o1.disabled).toBe(false);
    expect(o1.querySelector("[data-role='badge']")!.textContent).toBe("1");
    const o4 = root.querySelector("button[data-operator='O4']") as HTMLButtonElement;
    expect(o4.disabled).toBe(true);

    // Applying O1 grows the graph by a derived node.
    o1.click();
    await workbench.whenIdle();
    const nodes = root.querySelectorAll("[data-role='graph'] [data-node-id]");
    expect(nodes).toHaveLength(2);
    expect(workbench.state.activeNode).toBe("n2");

    // The timeline shows spans for both sets' instances.
    expect(
      root.querySelectorAll("[data-role='timeline'] .instance-span").length,
    ).toBeGreaterThanOrEqual(2);

    // Annotate the focused set: 280 characters pass, the 281st is
    // rejected inline before any request goes out.
    const textarea = root.querySelector(
      "[data-role='description-input']",
    ) as HTMLTextAreaElement;
    textarea.value = "d".repeat(280);
    textarea.dispatchEvent(new Event("input"));
    textarea.dispatchEvent(new Event("change"));
    await workbench.whenIdle();
    const saved = await new ApiClient(BASE).getSession(workbench.state.sessionId!);
    const focused = Object.values(saved.annotations).find(
      (a) => a.description.length > 0,
    );
    expect(focused?.description).toHaveLength(280);

    // The annotate round trip re-rendered the panel; grab the fresh field.
    const rendered = root.querySelector(
      "[data-role='description-input']",
    ) as HTMLTextAreaElement;
    rendered.value = "d".repeat(281);
    rendered.dispatchEvent(new Event("input"));
    expect(rendered.value).toHaveLength(280);
    expect(
      root.querySelector("[data-role='length-error']")!.textContent,
    ).toContain("280");

    // Heatmap download produces a non-empty CSV with the documented header.
    const csv = await workbench.downloadHeatmap();
    const lines = csv.trim().split("\n");
    expect(lines[0]).toBe("voice_id,note_index,onset,count");
    expect(lines.length).toBeGreaterThan(1);
    expect(lines.some((line) => /,[1-9]\d*$/.test(line))).toBe(true);
  });

  it("ignores cross-voice second clicks with a hint", async () => {
    const root = document.createElement("div");
    document.body.append(root);
    const workbench = new Workbench(root, new ApiClient(BASE));
    await workbench.start();
    await workbench.whenIdle();

    clickNote(root, 0);
    const otherVoiceNote = root.querySelector(
      "[data-voice='P2.v1'] g.note",
    ) as SVGElement;
    otherVoiceNote.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    await workbench.whenIdle();

    // Anchor survives, nothing was selected, and the status explains why.
    expect(workbench.state.selectionAnchor).not.toBeNull();
    expect(workbench.state.activeNode).toBeNull();
    expect(
      root.querySelector("[data-role='status']")!.textContent,
    ).toContain("single voice");

    // Escape clears the anchor.
    document.dispatchEvent(new KeyboardEvent("keydown", { key: "Escape" }));
    expect(workbench.state.selectionAnchor).toBeNull();
  });
});
