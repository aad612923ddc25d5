/**
 * Melodic Operator Selection: eight buttons, one per atomic operator.
 * A button is enabled exactly when the engine reports at least one
 * occurrence for it at the active node; the badge shows the count.
 */

import { clear, el } from "../dom.js";
import { OPERATORS, type AvailabilityWire, type OperatorCode } from "../types.js";

export interface OperatorCallbacks {
  onApply: (operator: OperatorCode) => void;
}

export interface OperatorModel {
  availability: AvailabilityWire | null;
  busy: boolean;
}

export class OperatorPanel {
  constructor(
    private readonly container: HTMLElement,
    private readonly callbacks: OperatorCallbacks,
  ) {}

  update(model: OperatorModel): void {
    clear(this.container);
    this.container.append(el("div", { class: "panel-header" }, "Operators"));
    const grid = el("div", { class: "operator-grid" });
    for (const { code, name } of OPERATORS) {
      const count = model.availability?.[code] ?? 0;
      const enabled = count > 0 && !model.busy;
      const button = el(
        "button",
        {
          class: "operator-button" + (enabled ? "" : " disabled"),
          "data-operator": code,
          disabled: !enabled,
          title: name,
        },
        el("span", { class: "operator-code" }, code),
        el("span", { class: "operator-name" }, name),
        el("span", { class: "badge", "data-role": "badge" }, String(count)),
      );
      button.addEventListener("click", () => this.callbacks.onApply(code));
      grid.append(button);
    }
    this.container.append(grid);
    if (!model.availability) {
      this.container.append(
        el("p", { class: "hint" }, "Select a pattern to see operator matches."),
      );
    }
  }
}
