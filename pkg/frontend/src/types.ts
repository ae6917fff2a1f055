// Wire types for the session service. Every shape here mirrors a JSON
// payload the service emits; the client adds nothing of its own.

export type SessionMode = "human-demo" | "agent-watch";

export type SessionStatus =
  | "running"
  | "success"
  | "failed_mine"
  | "failed_stalled"
  | "failed_step_cap";

export interface OpenedCell {
  r: number;
  c: number;
  count: number;
}

export interface Hypothesis {
  r: number;
  c: number;
  orient: number;
}

export interface View {
  status: SessionStatus;
  rows: number;
  cols: number;
  opened: OpenedCell[];
  agent: [number, number];
  hyp_count: number;
  hypotheses: Hypothesis[];
  /** Row-major feature scores, length rows * cols, each in [0, 1]. */
  feature: number[];
  steps: number;
  /** Present only when the service runs with debug settings. */
  ground_truth?: Hypothesis;
}

/** Static shape geometry: per-orientation cell offsets from the anchor. */
export interface TemplateMeta {
  name: string;
  orientations: number[];
  offsets: Record<string, [number, number][]>;
}

export interface CreateSessionResponse {
  id: string;
  view: View;
  template: TemplateMeta;
}

export interface SessionConfig {
  mode: SessionMode;
  rows?: number;
  cols?: number;
  template?: string;
  orientations?: number[];
  feature?: string;
  seed?: number;
  pose?: { r: number; c: number; orient?: number };
}

export interface OpenResponse {
  outcome: number | "mine";
  view: View;
}

export interface Decision {
  action: number;
  target: [number, number] | null;
  scores: (number | null)[] | null;
}

export interface StepFailure {
  reason: string;
  scores: (number | null)[] | null;
}

export interface AgentStepResponse {
  decision: Decision | null;
  outcome?: number;
  failure?: StepFailure;
  view: View;
}

export interface FinalizeResponse {
  stored: number;
  path: string;
  failed: boolean;
}

export interface ModelInfo {
  name: string;
  kind: string;
  classes: number;
  fingerprint: Record<string, unknown>;
}

export interface ModelsResponse {
  models: ModelInfo[];
}

export interface HealthResponse {
  status: string;
  sessions: number;
}

/** Score slot declaring the object located; the 9th entry of a score vector. */
export const TERMINAL_ACTION = 8;

/** Fixed direction order of score slots 0..7 as (dr, dc) from the agent. */
export const DIRECTION_VECTORS: ReadonlyArray<readonly [number, number]> = [
  [-1, 0],
  [-1, 1],
  [0, 1],
  [1, 1],
  [1, 0],
  [1, -1],
  [0, -1],
  [-1, -1],
];

/** Arrow glyph per direction slot, same order as DIRECTION_VECTORS. */
export const DIRECTION_ARROWS = ["↑", "↗", "→", "↘", "↓", "↙", "←", "↖"];
