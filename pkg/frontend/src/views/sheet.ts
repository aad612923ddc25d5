/**
 * Sheet View: simplified staff rendering (staff lines plus noteheads at
 * pitch height on a rational-time x-axis), paginated by the score's
 * page breaks. Detected patterns are tinted in place with their set
 * colors; overlaps blend through translucent fills.
 */

import { clear, el, svg } from "../dom.js";
import { parseRational, ratValue } from "../rational.js";
import {
  instanceKey,
  instanceNoteIds,
  noteCoverage,
  pageBounds,
  pageCount,
  setColor,
  withAlpha,
} from "../state.js";
import type { ScoreRender, SessionDoc } from "../types.js";

export interface SheetCallbacks {
  onNoteClick: (voiceId: string, noteId: string) => void;
  onHover: (key: string | null) => void;
  onHint: (message: string) => void;
  onPageChange: (page: number) => void;
}

export interface SheetModel {
  score: ScoreRender | null;
  doc: SessionDoc | null;
  anchor: { voiceId: string; noteId: string } | null;
  hover: string | null;
  page: number;
}

const BAND_HEIGHT = 86;
const BAND_GAP = 14;
const PX_PER_QUARTER = 26;
const NOTE_RADIUS = 5;

export class SheetView {
  constructor(
    private readonly container: HTMLElement,
    private readonly callbacks: SheetCallbacks,
  ) {}

  update(model: SheetModel): void {
    clear(this.container);
    if (!model.score) {
      this.container.append(el("p", { class: "placeholder" }, "No score loaded."));
      return;
    }
    const score = model.score;
    const pages = pageCount(score);
    const header = el(
      "div",
      { class: "panel-header" },
      el("span", {}, `${score.title || score.id} · page ${model.page + 1}/${pages}`),
      this.pageButton("prev", model.page > 0, () =>
        this.callbacks.onPageChange(model.page - 1),
      ),
      this.pageButton("next", model.page < pages - 1, () =>
        this.callbacks.onPageChange(model.page + 1),
      ),
    );
    this.container.append(header);
    if (model.anchor) {
      this.container.append(
        el(
          "p",
          { class: "hint", "data-role": "anchor-hint" },
          "Anchor set; pick a later note in the same voice (Esc cancels).",
        ),
      );
    }
    this.container.append(this.renderSvg(model, score));
  }

  private pageButton(label: string, enabled: boolean, onClick: () => void) {
    const button = el("button", { class: "page-nav", disabled: !enabled }, label);
    button.addEventListener("click", onClick);
    return button;
  }

  private renderSvg(model: SheetModel, score: ScoreRender): SVGElement {
    const { start, end } = pageBounds(score, model.page);
    const startValue = ratValue(start);
    const width = Math.max(
      120,
      (ratValue(end) - startValue) * PX_PER_QUARTER + 60,
    );
    const height = score.voices.length * (BAND_HEIGHT + BAND_GAP);
    const root = svg("svg", {
      class: "sheet-svg",
      width,
      height,
      "data-role": "sheet",
    });

    const coverage = model.doc ? noteCoverage(score, model.doc) : new Map<string, string[]>();
    const hoveredNotes = this.hoveredNoteIds(model, score);

    score.voices.forEach((voice, index) => {
      const top = index * (BAND_HEIGHT + BAND_GAP);
      const band = svg("g", { "data-voice": voice.id });
      for (let line = 0; line < 5; line++) {
        band.append(
          svg("line", {
            x1: 0,
            x2: width,
            y1: top + 18 + line * 12,
            y2: top + 18 + line * 12,
            class: "staff-line",
          }),
        );
      }
      band.append(
        svg("text", { x: 4, y: top + 12, class: "voice-label" }),
      );
      (band.lastChild as SVGElement).textContent = voice.id;

      const pitches = voice.notes.map((n) => n.pitch);
      const low = pitches.length ? Math.min(...pitches) : 60;
      const high = pitches.length ? Math.max(...pitches) : 72;
      const yFor = (pitch: number) => {
        const span = Math.max(high - low, 1);
        return top + BAND_HEIGHT - 16 - ((pitch - low) / span) * (BAND_HEIGHT - 34);
      };

      for (const note of voice.notes) {
        const onset = ratValue(parseRational(note.onset));
        if (onset < startValue || onset >= ratValue(end)) continue;
        const x = (onset - startValue) * PX_PER_QUARTER + 30;
        const duration = ratValue(parseRational(note.duration));
        const y = yFor(note.pitch);
        const group = svg("g", {
          class: "note",
          "data-note-id": note.id,
          "data-voice": voice.id,
        });
        group.append(
          svg("line", {
            x1: x,
            x2: x + duration * PX_PER_QUARTER - 4,
            y1: y,
            y2: y,
            class: "duration-tail",
          }),
        );
        const tints = coverage.get(note.id) ?? [];
        for (const setId of tints) {
          group.append(
            svg("rect", {
              x: x - NOTE_RADIUS - 2,
              y: y - NOTE_RADIUS - 2,
              width: (NOTE_RADIUS + 2) * 2,
              height: (NOTE_RADIUS + 2) * 2,
              fill: withAlpha(setColor(model.doc!, setId), 0.35),
              class: "tint",
              "data-set-id": setId,
            }),
          );
        }
        const classes = ["notehead"];
        if (model.anchor?.noteId === note.id) classes.push("anchor");
        if (model.anchor && voice.id === model.anchor.voiceId) {
          classes.push("candidate");
        }
        if (hoveredNotes.has(note.id)) classes.push("hovered");
        group.append(
          svg("circle", { cx: x, cy: y, r: NOTE_RADIUS, class: classes.join(" ") }),
        );
        group.addEventListener("click", () =>
          this.callbacks.onNoteClick(voice.id, note.id),
        );
        group.addEventListener("mouseenter", () =>
          this.callbacks.onHover(this.instanceKeyForNote(model, score, note.id)),
        );
        group.addEventListener("mouseleave", () => this.callbacks.onHover(null));
        band.append(group);
      }
      root.append(band);
    });
    return root;
  }

  /** First instance covering the note, as the shared hover key. */
  private instanceKeyForNote(
    model: SheetModel,
    score: ScoreRender,
    noteId: string,
  ): string | null {
    if (!model.doc) return null;
    for (const set of Object.values(model.doc.sets)) {
      for (const instance of set.instances) {
        if (instanceNoteIds(score, instance).includes(noteId)) {
          return instanceKey(instance);
        }
      }
    }
    return null;
  }

  private hoveredNoteIds(model: SheetModel, score: ScoreRender): Set<string> {
    const ids = new Set<string>();
    if (!model.doc || !model.hover) return ids;
    for (const set of Object.values(model.doc.sets)) {
      for (const instance of set.instances) {
        if (instanceKey(instance) === model.hover) {
          for (const id of instanceNoteIds(score, instance)) ids.add(id);
        }
      }
    }
    return ids;
  }
}
