/**
 * Melodic Pattern Configuration: stats for the focused set, label and
 * color editing, a description field with a live 280-character counter
 * that rejects the 281st character inline, and deletion with a
 * confirmation that names the derived subtree being removed.
 */

import { clear, el } from "../dom.js";
import { describeChain, subtreeSetIds } from "../state.js";
import {
  MAX_DESCRIPTION,
  MAX_LABEL,
  type SessionDoc,
  type StatsWire,
} from "../types.js";

export interface ConfigCallbacks {
  onAnnotate: (
    setId: string,
    patch: { label?: string; color?: string; description?: string },
  ) => void;
  onDelete: (setId: string) => void;
}

export interface ConfigModel {
  doc: SessionDoc | null;
  setId: string | null;
  stats: StatsWire | null;
}

export class PatternConfigPanel {
  private pendingDelete: string | null = null;

  constructor(
    private readonly container: HTMLElement,
    private readonly callbacks: ConfigCallbacks,
  ) {}

  update(model: ConfigModel): void {
    clear(this.container);
    this.container.append(el("div", { class: "panel-header" }, "Pattern"));
    if (!model.doc || !model.setId || !(model.setId in model.doc.sets)) {
      this.container.append(
        el("p", { class: "placeholder" }, "Click a pattern to configure it."),
      );
      this.pendingDelete = null;
      return;
    }
    const doc = model.doc;
    const setId = model.setId;
    const set = doc.sets[setId]!;
    const annotation = doc.annotations[setId] ?? {
      label: "",
      color: "#cccccc",
      description: "",
    };

    const statsBlock = el("dl", { class: "stats", "data-role": "stats" });
    const addStat = (name: string, value: string) => {
      statsBlock.append(el("dt", {}, name), el("dd", {}, value));
    };
    addStat("chain", describeChain(set));
    if (model.stats) {
      addStat("occurrences", String(model.stats.total));
      addStat("unique", String(model.stats.unique));
      addStat("overlapping", String(model.stats.overlapping));
      addStat("pattern length", `${model.stats.pattern_length} notes`);
    }
    this.container.append(statsBlock);

    const labelInput = el("input", {
      type: "text",
      value: annotation.label,
      maxlength: MAX_LABEL,
      "data-role": "label-input",
      placeholder: "short label",
    });
    labelInput.addEventListener("change", () =>
      this.callbacks.onAnnotate(setId, { label: labelInput.value }),
    );

    const colorInput = el("input", {
      type: "color",
      value: annotation.color,
      "data-role": "color-input",
    });
    colorInput.addEventListener("change", () =>
      this.callbacks.onAnnotate(setId, { color: colorInput.value }),
    );

    const description = el("textarea", {
      rows: 4,
      "data-role": "description-input",
      placeholder: "detailed description",
    });
    description.value = annotation.description;
    const counter = el(
      "span",
      { class: "char-counter", "data-role": "char-counter" },
      `${annotation.description.length}/${MAX_DESCRIPTION}`,
    );
    const lengthError = el("span", {
      class: "inline-error",
      "data-role": "length-error",
    });
    description.addEventListener("input", () => {
      const length = description.value.length;
      counter.textContent = `${length}/${MAX_DESCRIPTION}`;
      if (length > MAX_DESCRIPTION) {
        description.value = description.value.slice(0, MAX_DESCRIPTION);
        counter.textContent = `${MAX_DESCRIPTION}/${MAX_DESCRIPTION}`;
        lengthError.textContent = `description is capped at ${MAX_DESCRIPTION} characters`;
      } else {
        lengthError.textContent = "";
      }
    });
    description.addEventListener("change", () => {
      if (description.value.length <= MAX_DESCRIPTION) {
        this.callbacks.onAnnotate(setId, { description: description.value });
      }
    });

    this.container.append(
      el("label", {}, "Label ", labelInput),
      el("label", {}, "Color ", colorInput),
      el("label", {}, "Description ", description, counter, lengthError),
    );

    const subtree = subtreeSetIds(doc.graph, setId);
    const deleteButton = el(
      "button",
      { class: "danger", "data-role": "delete-button" },
      this.pendingDelete === setId
        ? `Really delete ${subtree.length} set(s)? (${subtree.join(", ")})`
        : "Delete pattern",
    );
    deleteButton.addEventListener("click", () => {
      if (this.pendingDelete === setId) {
        this.pendingDelete = null;
        this.callbacks.onDelete(setId);
      } else {
        this.pendingDelete = setId;
        deleteButton.textContent = `Really delete ${subtree.length} set(s)? (${subtree.join(", ")})`;
      }
    });
    this.container.append(deleteButton);
  }
}
