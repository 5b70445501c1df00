// Wire types mirroring the ceapost HTTP API. The client never computes
// statistics; every number shown on screen originates from these payloads.

export interface SessionDigest {
  id?: string;
  revision: number;
  labels: string[];
  n_sim: number;
  n_int: number;
  ref: number; // 1-based
  comparisons: number[]; // 1-based
  kmax: number;
  grid_points: number;
  icer: (number | null)[];
  kstar: number[];
  extensions: string[];
  digest_hash: string;
  has_parameters?: boolean;
  parameter_names?: string[];
  advisories?: string[];
}

export interface SummaryResponse {
  revision: number;
  k: number;
  summary: {
    reference_label: string;
    comparator_labels: string[];
    decision: string;
    k: number;
    expected_utility: [string, number][];
    comparison_rows: [string, number, number, number | null][];
    optimal_label: string;
    evpi: number;
    kstar: number[];
  };
  text: string;
}

export interface PlotSeries {
  kind: "points" | "line" | "step" | "area" | "segments" | "bars";
  label: string;
  x: number[];
  y: number[];
  color: string;
}

export interface PlotAxes {
  x_title: string;
  y_title: string;
  x_range: [number, number];
  y_range: [number, number];
}

export interface PlotSpec {
  kind: string;
  title: string;
  series: PlotSeries[];
  axes: PlotAxes;
  annotations: Record<string, unknown>[];
  legend: string;
  categories: string[];
  children: PlotSpec[];
}

export interface PlotResponse {
  revision: number;
  kind: string;
  spec: PlotSpec;
}

export interface JobResponse {
  id: string;
  status: "running" | "done" | "error";
  revision: number;
  result: EvppiPayload | null;
  error: string | null;
}

export interface EvppiPayload {
  params: string[];
  evppi: number[];
  evpi: number[];
  method: string;
  k_grid: number[];
  info_rank: { param: string; proportion: number }[] | null;
  info_rank_k: number;
}

export interface CreateSessionBody {
  effects: number[][];
  costs: number[][];
  labels?: string[];
  ref?: number;
  comparisons?: number[];
  kmax?: number;
  grid_points?: number;
  parameters?: { names: string[]; mat: number[][] };
}

export interface PatchBody {
  ref?: number;
  comparisons?: number[];
  kmax?: number;
}

export type ExtensionBody =
  | { riskav: number[] }
  | { shares: number[] }
  | { multice: true };
