/**
 * Pure view-model helpers shared by the five views.
 *
 * Everything here derives from the session document and score render
 * model; the views never invent pattern data of their own.
 */

import { parseRational, ratCompare, type Rational } from "./rational.js";
import type {
  GraphWire,
  InstanceWire,
  ScoreRender,
  SessionDoc,
  SetWire,
  VoiceWire,
} from "./types.js";

export interface ViewState {
  scoreId: string | null;
  sessionId: string | null;
  selectionAnchor: { voiceId: string; noteId: string } | null;
  activeNode: string | null;
  hover: string | null; // instance key, note id, or node id
  page: number;
}

export function initialViewState(): ViewState {
  return {
    scoreId: null,
    sessionId: null,
    selectionAnchor: null,
    activeNode: null,
    hover: null,
    page: 0,
  };
}

export function instanceKey(instance: InstanceWire): string {
  return `${instance.voice}:${instance.start_index}:${instance.length}`;
}

export function voiceById(score: ScoreRender, voiceId: string): VoiceWire | undefined {
  return score.voices.find((v) => v.id === voiceId);
}

export function instanceNoteIds(score: ScoreRender, instance: InstanceWire): string[] {
  const voice = voiceById(score, instance.voice);
  if (!voice) return [];
  return voice.notes
    .slice(instance.start_index, instance.start_index + instance.length)
    .map((n) => n.id);
}

/** Which sets tint each note; drives blended highlighting. */
export function noteCoverage(
  score: ScoreRender,
  doc: SessionDoc,
): Map<string, string[]> {
  const covered = new Map<string, string[]>();
  for (const set of Object.values(doc.sets)) {
    for (const instance of set.instances) {
      for (const noteId of instanceNoteIds(score, instance)) {
        const list = covered.get(noteId) ?? [];
        list.push(set.id);
        covered.set(noteId, list);
      }
    }
  }
  return covered;
}

export function setColor(doc: SessionDoc, setId: string): string {
  return doc.annotations[setId]?.color ?? "#cccccc";
}

/** Page index for an onset given the score's page-break onsets. */
export function pageOfOnset(onset: Rational, breaks: Rational[]): number {
  let page = 0;
  for (const brk of breaks) {
    if (ratCompare(onset, brk) >= 0) page += 1;
    else break;
  }
  return page;
}

export function pageCount(score: ScoreRender): number {
  return score.page_breaks.length + 1;
}

export function scoreEnd(score: ScoreRender): Rational {
  let end: Rational = { num: 0, den: 1 };
  for (const voice of score.voices) {
    for (const note of voice.notes) {
      const onset = parseRational(note.onset);
      const duration = parseRational(note.duration);
      const noteEnd: Rational = {
        num: onset.num * duration.den + duration.num * onset.den,
        den: onset.den * duration.den,
      };
      if (ratCompare(noteEnd, end) > 0) end = noteEnd;
    }
  }
  return end;
}

/** [start, end) bounds of one page in quarter notes. */
export function pageBounds(
  score: ScoreRender,
  page: number,
): { start: Rational; end: Rational } {
  const breaks = score.page_breaks.map(parseRational);
  const start = page === 0 ? { num: 0, den: 1 } : breaks[page - 1]!;
  const end = page < breaks.length ? breaks[page]! : scoreEnd(score);
  return { start, end };
}

/** Sets that would disappear when deleting one set (its derived subtree). */
export function subtreeSetIds(graph: GraphWire, setId: string): string[] {
  const nodeBySet = new Map(graph.nodes.map((n) => [n.pattern_set_id, n]));
  const root = nodeBySet.get(setId);
  if (!root) return [setId];
  const doomed = [root.id];
  const frontier = [root.id];
  while (frontier.length) {
    const current = frontier.shift()!;
    for (const edge of graph.edges) {
      if (edge.from === current && !doomed.includes(edge.to)) {
        doomed.push(edge.to);
        frontier.push(edge.to);
      }
    }
  }
  const setByNode = new Map(graph.nodes.map((n) => [n.id, n.pattern_set_id]));
  return doomed.map((nodeId) => setByNode.get(nodeId)!);
}

export interface NodePosition {
  id: string;
  depth: number;
  lane: number;
}

/** Layered layout: roots in column 0, children one column per hop. */
export function layoutGraph(graph: GraphWire): NodePosition[] {
  const depth = new Map<string, number>();
  const parent = new Map<string, string>();
  for (const edge of graph.edges) parent.set(edge.to, edge.from);
  const resolve = (id: string): number => {
    const cached = depth.get(id);
    if (cached !== undefined) return cached;
    const up = parent.get(id);
    const d = up === undefined ? 0 : resolve(up) + 1;
    depth.set(id, d);
    return d;
  };
  const lanes = new Map<number, number>();
  const positions: NodePosition[] = [];
  for (const node of graph.nodes) {
    const d = resolve(node.id);
    const lane = lanes.get(d) ?? 0;
    lanes.set(d, lane + 1);
    positions.push({ id: node.id, depth: d, lane });
  }
  return positions;
}

export function describeChain(set: SetWire): string {
  return set.chain.length ? set.chain.join(" → ") : "selection";
}

/** rgba() with alpha so overlapping tints compose visually. */
export function withAlpha(hexColor: string, alpha: number): string {
  const r = parseInt(hexColor.slice(1, 3), 16);
  const g = parseInt(hexColor.slice(3, 5), 16);
  const b = parseInt(hexColor.slice(5, 7), 16);
  return `rgba(${r}, ${g}, ${b}, ${alpha})`;
}
