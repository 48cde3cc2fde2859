// Payload shapes of the optimization service's HTTP/JSON API.

export interface Rect {
  center_u: number;
  center_v: number;
  w: number;
  h: number;
}

export interface Rendering {
  color: [number, number, number, number];
  blink_hz: number;
  rect: Rect;
  loudness: number;
}

export interface DesignPayload {
  params: number[];
  rendering: Rendering;
}

export interface SessionState {
  session_id: string;
  iteration: number;
  total_iterations: number;
  n_sobol: number;
  phase: "sampling" | "optimization" | "finished";
  finished: boolean;
  stopped_early: boolean;
  design: DesignPayload | null;
}

export interface RatingPayload {
  iteration: number;
  trust_items: [number, number];
  predictability_items: [number, number, number, number];
  mental_demand: number;
  safety_items: [number, number, number, number];
  usefulness: number;
  satisfaction: number;
  visual_appeal: number;
  time_to_cross_s: number;
}

export interface ParetoPoint {
  iteration: number;
  params: number[];
  objectives: number[];
}

export interface ParetoSummary {
  points: ParetoPoint[];
  hypervolume: number;
  reference_point: number[] | null;
}
