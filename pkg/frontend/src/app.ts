/**
 * Workbench: wires the five views over the HTTP API.
 *
 * All mutations round-trip through the server and are serialized (at
 * most one in flight); views re-render from the freshly fetched session
 * document, never from locally invented state.
 */

import { ApiClient, ApiError } from "./api.js";
import { clear, el } from "./dom.js";
import { initialViewState, type ViewState } from "./state.js";
import type {
  AvailabilityWire,
  OperatorCode,
  ScoreMeta,
  ScoreRender,
  SessionDoc,
  StatsWire,
} from "./types.js";
import { PatternConfigPanel } from "./views/config.js";
import { GraphView } from "./views/graph.js";
import { OperatorPanel } from "./views/operators.js";
import { SheetView } from "./views/sheet.js";
import { VoiceTimeline } from "./views/timeline.js";

export class Workbench {
  readonly state: ViewState = initialViewState();
  private score: ScoreRender | null = null;
  private doc: SessionDoc | null = null;
  private availability: AvailabilityWire | null = null;
  private stats: StatsWire | null = null;
  private focusedSet: string | null = null;
  private statusLine = "";
  private busy = false;
  private queue: Promise<void> = Promise.resolve();

  private readonly sheet: SheetView;
  private readonly operators: OperatorPanel;
  private readonly timeline: VoiceTimeline;
  private readonly graph: GraphView;
  private readonly config: PatternConfigPanel;
  private readonly status: HTMLElement;
  private readonly picker: HTMLSelectElement;

  constructor(
    root: HTMLElement,
    private readonly api: ApiClient,
  ) {
    const toolbar = el("div", { class: "toolbar" });
    this.picker = el("select", { "data-role": "score-picker" });
    this.picker.addEventListener("change", () => {
      void this.enqueue(() => this.openScore(this.picker.value));
    });
    const heatmapButton = el(
      "button",
      { "data-role": "heatmap-download" },
      "Download heatmap",
    );
    heatmapButton.addEventListener("click", () => {
      void this.enqueue(async () => {
        await this.downloadHeatmap();
      });
    });
    this.status = el("span", { class: "status", "data-role": "status" });
    toolbar.append(this.picker, heatmapButton, this.status);

    const sheetPanel = el("section", { class: "panel sheet-panel" });
    const operatorPanel = el("section", { class: "panel operator-panel" });
    const timelinePanel = el("section", { class: "panel timeline-panel" });
    const graphPanel = el("section", { class: "panel graph-panel" });
    const configPanel = el("section", { class: "panel config-panel" });
    clear(root);
    root.append(toolbar, timelinePanel, sheetPanel, operatorPanel, graphPanel, configPanel);

    this.sheet = new SheetView(sheetPanel, {
      onNoteClick: (voiceId, noteId) => this.handleNoteClick(voiceId, noteId),
      onHover: (key) => this.setHover(key),
      onHint: (message) => this.setStatus(message),
      onPageChange: (page) => {
        this.state.page = page;
        this.render();
      },
    });
    this.operators = new OperatorPanel(operatorPanel, {
      onApply: (operator) => {
        void this.enqueue(() => this.applyOperator(operator));
      },
    });
    this.timeline = new VoiceTimeline(timelinePanel, {
      onHoverPage: (page) => {
        if (page !== this.state.page) {
          this.state.page = page;
          this.render();
        }
      },
      onHover: (key) => this.setHover(key),
      onSpanClick: (setId) => {
        void this.enqueue(() => this.focusSet(setId));
      },
    });
    this.graph = new GraphView(graphPanel, {
      onNodeClick: (_nodeId, setId) => {
        void this.enqueue(() => this.focusSet(setId));
      },
      onHoverNode: (nodeId) => this.setHover(nodeId),
    });
    this.config = new PatternConfigPanel(configPanel, {
      onAnnotate: (setId, patch) => {
        void this.enqueue(() => this.annotate(setId, patch));
      },
      onDelete: (setId) => {
        void this.enqueue(() => this.deleteSet(setId));
      },
    });

    document.addEventListener("keydown", (event) => {
      if (event.key === "Escape" && this.state.selectionAnchor) {
        this.state.selectionAnchor = null;
        this.setStatus("Selection cancelled.");
        this.render();
      }
    });

    this.render();
  }

  /** Load the corpus and open the first score. */
  async start(): Promise<void> {
    const metas = await this.api.listScores();
    this.populatePicker(metas);
    if (metas.length) {
      await this.openScore(metas[0]!.id);
    }
  }

  /** Resolves when no mutation is in flight (tests await this). */
  whenIdle(): Promise<void> {
    return this.queue;
  }

  handleNoteClick(voiceId: string, noteId: string): void {
    if (!this.state.sessionId) return;
    const anchor = this.state.selectionAnchor;
    if (!anchor) {
      this.state.selectionAnchor = { voiceId, noteId };
      this.setStatus(`Anchor ${noteId}; now pick the last note of the pattern.`);
      this.render();
      return;
    }
    if (voiceId !== anchor.voiceId) {
      // Patterns live in one voice; keep the anchor, explain the no-op.
      this.setStatus("Patterns stay within a single voice; pick a note in the same staff.");
      this.render();
      return;
    }
    if (!this.isAfterAnchor(anchor, noteId)) {
      this.setStatus("Pick a note after the anchor (patterns read left to right).");
      this.render();
      return;
    }
    void this.enqueue(() => this.completeSelection(anchor, noteId));
  }

  async downloadHeatmap(): Promise<string> {
    if (!this.state.sessionId) return "";
    const csv = await this.api.heatmapCsv(this.state.sessionId);
    if (typeof URL !== "undefined" && "createObjectURL" in URL) {
      try {
        const link = el("a", {
          href: URL.createObjectURL(new Blob([csv], { type: "text/csv" })),
          download: `${this.state.sessionId}-heatmap.csv`,
        });
        link.click();
      } catch {
        // jsdom lacks object URLs; the caller still gets the CSV text.
      }
    }
    this.setStatus(`Heatmap exported (${csv.split("\n").length - 2} rows).`);
    this.render();
    return csv;
  }

  // -- internal flows ----------------------------------------------------

  private async openScore(scoreId: string): Promise<void> {
    this.score = await this.api.getScore(scoreId);
    this.state.scoreId = scoreId;
    this.state.page = 0;
    this.state.selectionAnchor = null;
    this.state.activeNode = null;
    this.focusedSet = null;
    this.availability = null;
    this.stats = null;
    this.state.sessionId = await this.api.createSession(scoreId);
    this.doc = await this.api.getSession(this.state.sessionId);
    this.setStatus(`Session ${this.state.sessionId} on ${scoreId}.`);
    this.render();
  }

  private async completeSelection(
    anchor: { voiceId: string; noteId: string },
    lastNoteId: string,
  ): Promise<void> {
    if (!this.state.sessionId) return;
    this.busy = true;
    this.render();
    try {
      const response = await this.api.select(
        this.state.sessionId,
        anchor.voiceId,
        anchor.noteId,
        lastNoteId,
      );
      this.state.selectionAnchor = null;
      this.state.activeNode = response.node_id;
      this.focusedSet = response.set.id;
      await this.refreshAfterMutation();
      this.setStatus(`Selected ${response.set.id}.`);
    } catch (error) {
      this.state.selectionAnchor = null;
      this.reportError(error);
    } finally {
      this.busy = false;
      this.render();
    }
  }

  private async applyOperator(operator: OperatorCode): Promise<void> {
    if (!this.state.sessionId || !this.state.activeNode) return;
    this.busy = true;
    this.render();
    try {
      const response = await this.api.apply(
        this.state.sessionId,
        this.state.activeNode,
        operator,
      );
      this.state.activeNode = response.node_id;
      this.focusedSet = response.set.id;
      await this.refreshAfterMutation();
      this.setStatus(`${operator} found ${response.set.instances.length} pattern(s).`);
    } catch (error) {
      this.reportError(error);
    } finally {
      this.busy = false;
      this.render();
    }
  }

  private async annotate(
    setId: string,
    patch: { label?: string; color?: string; description?: string },
  ): Promise<void> {
    if (!this.state.sessionId) return;
    try {
      await this.api.annotate(this.state.sessionId, setId, patch);
      await this.refreshAfterMutation();
      this.setStatus(`Annotation saved for ${setId}.`);
    } catch (error) {
      this.reportError(error);
    }
    this.render();
  }

  private async deleteSet(setId: string): Promise<void> {
    if (!this.state.sessionId) return;
    try {
      const { removed } = await this.api.deleteSet(this.state.sessionId, setId);
      if (this.focusedSet && removed.includes(this.focusedSet)) {
        this.focusedSet = null;
        this.stats = null;
      }
      this.state.activeNode = null;
      this.availability = null;
      await this.refreshAfterMutation();
      this.setStatus(`Removed ${removed.join(", ")}.`);
    } catch (error) {
      this.reportError(error);
    }
    this.render();
  }

  private async focusSet(setId: string): Promise<void> {
    if (!this.state.sessionId || !this.doc) return;
    this.focusedSet = setId;
    const node = this.doc.graph.nodes.find((n) => n.pattern_set_id === setId);
    this.state.activeNode = node?.id ?? null;
    this.stats = await this.api.stats(this.state.sessionId, setId);
    if (this.state.activeNode) {
      this.availability = await this.api.operators(
        this.state.sessionId,
        this.state.activeNode,
      );
    }
    this.render();
  }

  private async refreshAfterMutation(): Promise<void> {
    if (!this.state.sessionId) return;
    this.doc = await this.api.getSession(this.state.sessionId);
    if (this.focusedSet && this.doc && this.focusedSet in this.doc.sets) {
      this.stats = await this.api.stats(this.state.sessionId, this.focusedSet);
    } else {
      this.stats = null;
    }
    if (this.state.activeNode) {
      this.availability = await this.api.operators(
        this.state.sessionId,
        this.state.activeNode,
      );
    } else {
      this.availability = null;
    }
  }

  private enqueue(action: () => Promise<void>): Promise<void> {
    this.queue = this.queue.then(action, action);
    return this.queue;
  }

  private isAfterAnchor(
    anchor: { voiceId: string; noteId: string },
    noteId: string,
  ): boolean {
    const voice = this.score?.voices.find((v) => v.id === anchor.voiceId);
    if (!voice) return false;
    const first = voice.notes.findIndex((n) => n.id === anchor.noteId);
    const last = voice.notes.findIndex((n) => n.id === noteId);
    return first >= 0 && last > first;
  }

  private populatePicker(metas: ScoreMeta[]): void {
    clear(this.picker);
    for (const meta of metas) {
      this.picker.append(
        el("option", { value: meta.id }, `${meta.title || meta.id}`),
      );
    }
  }

  private setHover(key: string | null): void {
    if (key !== this.state.hover) {
      this.state.hover = key;
      this.render();
    }
  }

  private setStatus(message: string): void {
    this.statusLine = message;
  }

  private reportError(error: unknown): void {
    if (error instanceof ApiError) {
      this.setStatus(`Error (${error.code}): ${error.message}`);
    } else {
      this.setStatus(`Error: ${String(error)}`);
    }
  }

  private render(): void {
    this.status.textContent = this.statusLine;
    this.sheet.update({
      score: this.score,
      doc: this.doc,
      anchor: this.state.selectionAnchor,
      hover: this.state.hover,
      page: this.state.page,
    });
    this.operators.update({ availability: this.availability, busy: this.busy });
    this.timeline.update({
      score: this.score,
      doc: this.doc,
      hover: this.state.hover,
    });
    this.graph.update({
      doc: this.doc,
      activeNode: this.state.activeNode,
      hover: this.state.hover,
    });
    this.config.update({
      doc: this.doc,
      setId: this.focusedSet,
      stats: this.stats,
    });
  }
}

export function mount(root: HTMLElement, baseUrl: string): Workbench {
  return new Workbench(root, new ApiClient(baseUrl));
}
