/** Wire types mirroring the HTTP API's JSON bodies. */

export type OperatorCode = "O1" | "O2" | "O3" | "O4" | "O5" | "O6" | "O7" | "O8";

export const OPERATORS: ReadonlyArray<{ code: OperatorCode; name: string }> = [
  { code: "O1", name: "Transposition" },
  { code: "O2", name: "Mirror on X-Axis" },
  { code: "O3", name: "Mirror on Y-Axis" },
  { code: "O4", name: "Augmentation" },
  { code: "O5", name: "Diminution" },
  { code: "O6", name: "Same Pitch" },
  { code: "O7", name: "Rhythm Only" },
  { code: "O8", name: "Repetition" },
];

export interface ScoreMeta {
  id: string;
  title: string;
  composer: string;
  part_count: number;
  note_count: number;
  source_path: string;
}

export interface NoteWire {
  id: string;
  pitch: number;
  onset: string;
  duration: string;
}

export interface RestWire {
  onset: string;
  duration: string;
}

export interface VoiceWire {
  id: string;
  notes: NoteWire[];
  rests: RestWire[];
}

export interface ScoreRender {
  id: string;
  title: string;
  composer: string;
  parts: Array<{ id: string; name: string }>;
  voices: VoiceWire[];
  page_breaks: string[];
}

export interface InstanceWire {
  voice: string;
  start_index: number;
  length: number;
}

export interface OriginWire {
  kind: "selection" | "derived";
  parent_set_id: string | null;
  operator: OperatorCode | null;
}

export interface AnnotationWire {
  label: string;
  color: string;
  description: string;
}

export interface SetWire {
  id: string;
  instances: InstanceWire[];
  origin: OriginWire;
  chain: OperatorCode[];
  annotation?: AnnotationWire;
}

export interface NodeWire {
  id: string;
  pattern_set_id: string;
  kind: "selection" | "derived";
  label: string | null;
  chain?: OperatorCode[];
  instance_count?: number;
}

export interface EdgeWire {
  from: string;
  to: string;
  operator: OperatorCode;
  style: "solid";
}

export interface BridgeWire {
  a: string;
  b: string;
  shared_count: number;
  style: "dashed";
}

export interface GraphWire {
  nodes: NodeWire[];
  edges: EdgeWire[];
  bridges: BridgeWire[];
}

export interface SessionDoc {
  version: string;
  id: string;
  score_id: string;
  sets: Record<string, SetWire>;
  graph: GraphWire;
  annotations: Record<string, AnnotationWire>;
  timestamps: { created: string; modified: string };
}

export interface SelectionResponse {
  node_id: string;
  set: SetWire;
}

export interface ApplyResponse {
  node_id: string;
  edge: EdgeWire;
  set: SetWire;
  bridges: BridgeWire[];
}

export interface StatsWire {
  total: number;
  unique: number;
  overlapping: number;
  pattern_length: number;
}

export type AvailabilityWire = Record<OperatorCode, number>;

export const MAX_DESCRIPTION = 280;
export const MAX_LABEL = 40;
