/**
 * Voice Separation View: one row per voice on a shared time axis, with
 * every pattern instance drawn as a colored span. Vertical lines mark
 * the sheet's page breaks; hovering a position navigates the sheet to
 * the corresponding page, clicking a span opens its set in the
 * configuration panel.
 */

import { clear, el, svg } from "../dom.js";
import { parseRational, ratValue } from "../rational.js";
import {
  instanceKey,
  pageOfOnset,
  scoreEnd,
  setColor,
  voiceById,
} from "../state.js";
import type { ScoreRender, SessionDoc } from "../types.js";

export interface TimelineCallbacks {
  onHoverPage: (page: number) => void;
  onHover: (key: string | null) => void;
  onSpanClick: (setId: string) => void;
}

export interface TimelineModel {
  score: ScoreRender | null;
  doc: SessionDoc | null;
  hover: string | null;
}

const ROW_HEIGHT = 26;
const AXIS_WIDTH = 640;
const LABEL_WIDTH = 64;

export class VoiceTimeline {
  constructor(
    private readonly container: HTMLElement,
    private readonly callbacks: TimelineCallbacks,
  ) {}

  update(model: TimelineModel): void {
    clear(this.container);
    this.container.append(el("div", { class: "panel-header" }, "Voices"));
    if (!model.score) {
      this.container.append(el("p", { class: "placeholder" }, "No score loaded."));
      return;
    }
    const score = model.score;
    const total = Math.max(ratValue(scoreEnd(score)), 1);
    const xFor = (quarters: number) =>
      LABEL_WIDTH + (quarters / total) * (AXIS_WIDTH - LABEL_WIDTH - 8);
    const height = score.voices.length * ROW_HEIGHT + 8;
    const root = svg("svg", {
      class: "timeline-svg",
      width: AXIS_WIDTH,
      height,
      "data-role": "timeline",
    });
    const breaks = score.page_breaks.map(parseRational);

    root.addEventListener("mousemove", (event) => {
      const bounds = (root as unknown as SVGGraphicsElement).getBoundingClientRect();
      const x = (event as MouseEvent).clientX - bounds.left;
      const quarters = ((x - LABEL_WIDTH) / (AXIS_WIDTH - LABEL_WIDTH - 8)) * total;
      if (quarters >= 0) {
        const page = pageOfOnset(
          { num: Math.max(0, Math.round(quarters * 16)), den: 16 },
          breaks,
        );
        this.callbacks.onHoverPage(page);
      }
    });

    score.voices.forEach((voice, index) => {
      const y = index * ROW_HEIGHT + 6;
      const label = svg("text", { x: 4, y: y + 13, class: "voice-label" });
      label.textContent = voice.id;
      root.append(label);
      root.append(
        svg("line", {
          x1: LABEL_WIDTH,
          x2: AXIS_WIDTH - 8,
          y1: y + ROW_HEIGHT / 2,
          y2: y + ROW_HEIGHT / 2,
          class: "timeline-axis",
        }),
      );
    });

    for (const brk of breaks) {
      const x = xFor(ratValue(brk));
      root.append(
        svg("line", {
          x1: x,
          x2: x,
          y1: 2,
          y2: height - 2,
          class: "page-marker",
        }),
      );
    }

    if (model.doc) {
      const doc = model.doc;
      for (const set of Object.values(doc.sets)) {
        for (const instance of set.instances) {
          const voice = voiceById(score, instance.voice);
          if (!voice) continue;
          const rowIndex = score.voices.findIndex((v) => v.id === instance.voice);
          const first = voice.notes[instance.start_index];
          const last = voice.notes[instance.start_index + instance.length - 1];
          if (!first || !last) continue;
          const begin = ratValue(parseRational(first.onset));
          const finish =
            ratValue(parseRational(last.onset)) + ratValue(parseRational(last.duration));
          const key = instanceKey(instance);
          const span = svg("rect", {
            x: xFor(begin),
            y: rowIndex * ROW_HEIGHT + 10,
            width: Math.max(xFor(finish) - xFor(begin), 3),
            height: ROW_HEIGHT - 14,
            rx: 3,
            fill: setColor(doc, set.id),
            class: "instance-span" + (model.hover === key ? " hovered" : ""),
            "data-instance": key,
            "data-set-id": set.id,
          });
          span.addEventListener("click", () => this.callbacks.onSpanClick(set.id));
          span.addEventListener("mouseenter", () => this.callbacks.onHover(key));
          span.addEventListener("mouseleave", () => this.callbacks.onHover(null));
          const tooltip = svg("title");
          tooltip.textContent = `${set.id}: ${instance.voice} @ ${instance.start_index}`;
          span.append(tooltip);
          root.append(span);
        }
      }
    }
    this.container.append(root);
  }
}
