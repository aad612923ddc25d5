/**
 * Melodic Transformation Graph: node-link panel with solid operator
 * edges (labeled with the operator code) and dashed bridges whose
 * shared-pattern count appears in a tooltip on hover.
 */

import { clear, el, svg } from "../dom.js";
import { layoutGraph } from "../state.js";
import type { GraphWire, SessionDoc } from "../types.js";

export interface GraphCallbacks {
  onNodeClick: (nodeId: string, setId: string) => void;
  onHoverNode: (nodeId: string | null) => void;
}

export interface GraphModel {
  doc: SessionDoc | null;
  activeNode: string | null;
  hover: string | null;
}

const COLUMN = 120;
const ROW = 64;
const NODE_RADIUS = 17;

export class GraphView {
  constructor(
    private readonly container: HTMLElement,
    private readonly callbacks: GraphCallbacks,
  ) {}

  update(model: GraphModel): void {
    clear(this.container);
    this.container.append(el("div", { class: "panel-header" }, "Transformation graph"));
    const graph: GraphWire | null = model.doc?.graph ?? null;
    if (!graph || graph.nodes.length === 0) {
      this.container.append(
        el(
          "p",
          { class: "placeholder", "data-role": "graph-empty" },
          "No patterns yet. Select first and last note of a motif in the sheet.",
        ),
      );
      return;
    }
    const positions = new Map(
      layoutGraph(graph).map((p) => [
        p.id,
        { x: 48 + p.depth * COLUMN, y: 36 + p.lane * ROW },
      ]),
    );
    const width = Math.max(...[...positions.values()].map((p) => p.x)) + 72;
    const height = Math.max(...[...positions.values()].map((p) => p.y)) + 48;
    const root = svg("svg", {
      class: "graph-svg",
      width,
      height,
      "data-role": "graph",
    });

    for (const edge of graph.edges) {
      const from = positions.get(edge.from)!;
      const to = positions.get(edge.to)!;
      root.append(
        svg("line", {
          x1: from.x,
          y1: from.y,
          x2: to.x,
          y2: to.y,
          class: "graph-edge",
          "data-operator": edge.operator,
        }),
      );
      const label = svg("text", {
        x: (from.x + to.x) / 2,
        y: (from.y + to.y) / 2 - 4,
        class: "edge-label",
      });
      label.textContent = edge.operator;
      root.append(label);
    }

    for (const bridge of graph.bridges) {
      const a = positions.get(bridge.a)!;
      const b = positions.get(bridge.b)!;
      const line = svg("line", {
        x1: a.x,
        y1: a.y,
        x2: b.x,
        y2: b.y,
        class: "graph-bridge",
        "data-bridge": `${bridge.a}-${bridge.b}`,
      });
      const tooltip = svg("title");
      tooltip.textContent = `${bridge.shared_count} shared pattern(s)`;
      line.append(tooltip);
      root.append(line);
    }

    for (const node of graph.nodes) {
      const pos = positions.get(node.id)!;
      const classes = ["graph-node", node.kind];
      if (model.activeNode === node.id) classes.push("active");
      if (model.hover === node.id) classes.push("hovered");
      const group = svg("g", {
        class: classes.join(" "),
        "data-node-id": node.id,
        "data-set-id": node.pattern_set_id,
      });
      group.append(
        svg("circle", { cx: pos.x, cy: pos.y, r: NODE_RADIUS }),
      );
      const label = svg("text", { x: pos.x, y: pos.y + 4, class: "node-label" });
      label.textContent = `${node.pattern_set_id}`;
      group.append(label);
      const count = svg("text", {
        x: pos.x,
        y: pos.y + NODE_RADIUS + 12,
        class: "node-count",
      });
      count.textContent = `${node.instance_count ?? ""}`;
      group.append(count);
      group.addEventListener("click", () =>
        this.callbacks.onNodeClick(node.id, node.pattern_set_id),
      );
      group.addEventListener("mouseenter", () => this.callbacks.onHoverNode(node.id));
      group.addEventListener("mouseleave", () => this.callbacks.onHoverNode(null));
      root.append(group);
    }
    this.container.append(root);
  }
}
