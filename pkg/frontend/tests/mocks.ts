// Mock API client: records calls, serves canned revisioned responses.

import { vi } from "vitest";
import type { ApiClient } from "../src/api.js";
import type {
  PlotResponse,
  SessionDigest,
  SummaryResponse,
} from "../src/types.js";

export function digest(revision: number, overrides: Partial<SessionDigest> = {}): SessionDigest {
  return {
    id: "s1",
    revision,
    labels: ["Status quo", "New"],
    n_sim: 3,
    n_int: 2,
    ref: 2,
    comparisons: [1],
    kmax: 30,
    grid_points: 7,
    icer: [15],
    kstar: [15],
    extensions: [],
    digest_hash: `hash-rev-${revision}`,
    ...overrides,
  };
}

export function summaryResponse(revision: number, k: number): SummaryResponse {
  return {
    revision,
    k,
    summary: {
      reference_label: "New",
      comparator_labels: ["Status quo"],
      decision: "choose Status quo for k < 15 and New for k >= 15",
      k,
      expected_utility: [["Status quo", 10], ["New", 15]],
      comparison_rows: [["New vs Status quo", 5, 0.667, 15]],
      optimal_label: "New",
      evpi: 1.6667,
      kstar: [15],
    },
    text: `summary at k=${k} rev=${revision}`,
  };
}

export function plotResponse(revision: number, kind: string): PlotResponse {
  return {
    revision,
    kind,
    spec: {
      kind,
      title: `${kind} rev ${revision}`,
      series: [
        { kind: "line", label: "s", x: [0, 1], y: [0, 1], color: "#1b6ca8" },
      ],
      axes: { x_title: "x", y_title: "y", x_range: [0, 1], y_range: [0, 1] },
      annotations: [],
      legend: "none",
      categories: [],
      children: [],
    },
  };
}

export interface MockApi {
  createSession: ReturnType<typeof vi.fn>;
  getSession: ReturnType<typeof vi.fn>;
  getSummary: ReturnType<typeof vi.fn>;
  patchSession: ReturnType<typeof vi.fn>;
  postExtension: ReturnType<typeof vi.fn>;
  getPlot: ReturnType<typeof vi.fn>;
  postEvppi: ReturnType<typeof vi.fn>;
  getJob: ReturnType<typeof vi.fn>;
}

export function makeMockApi(revision = 1): MockApi {
  return {
    createSession: vi.fn(async () => digest(revision)),
    getSession: vi.fn(async () => digest(revision)),
    getSummary: vi.fn(async (_id: string, k: number) => summaryResponse(revision, k)),
    patchSession: vi.fn(async () => digest(revision + 1)),
    postExtension: vi.fn(async () => digest(revision + 1)),
    getPlot: vi.fn(async (_id: string, kind: string) => plotResponse(revision, kind)),
    postEvppi: vi.fn(async () => ({ job_id: "j1" })),
    getJob: vi.fn(async () => ({
      id: "j1",
      status: "done",
      revision,
      result: {
        params: ["phi"],
        evppi: [0, 1],
        evpi: [0, 2],
        method: "binned",
        k_grid: [0, 30],
        info_rank: [{ param: "phi", proportion: 0.9 }],
        info_rank_k: 15,
      },
      error: null,
    })),
  };
}

export function asClient(mock: MockApi): ApiClient {
  return mock as unknown as ApiClient;
}
