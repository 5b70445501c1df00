// Explorer state with revision gating: responses stamped with a revision
// older than the newest one already shown are discarded, so the UI always
// reflects the last acknowledged server state.

import type {
  EvppiPayload,
  PlotResponse,
  SessionDigest,
  SummaryResponse,
} from "./types.js";

export interface EvppiView {
  status: "idle" | "running" | "done" | "error";
  result: EvppiPayload | null;
  error: string | null;
}

export interface ExplorerState {
  sessionId: string | null;
  digest: SessionDigest | null;
  k: number;
  plotKinds: string[];
  pendingMutation: boolean;
  lastRevision: number;
  summary: SummaryResponse | null;
  plots: Record<string, PlotResponse>;
  fieldErrors: Record<string, string>;
  banner: string | null;
  evppi: EvppiView;
}

export type Listener = (state: ExplorerState) => void;

export class ExplorerStore {
  state: ExplorerState = {
    sessionId: null,
    digest: null,
    k: 0,
    plotKinds: ["ceplane", "eib", "ceac", "evi"],
    pendingMutation: false,
    lastRevision: 0,
    summary: null,
    plots: {},
    fieldErrors: {},
    banner: null,
    evppi: { status: "idle", result: null, error: null },
  };

  private listeners: Listener[] = [];

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  private patch(partial: Partial<ExplorerState>): void {
    this.state = { ...this.state, ...partial };
    this.emit();
  }

  startSession(digest: SessionDigest, k: number): void {
    this.patch({
      sessionId: digest.id ?? null,
      digest,
      k,
      lastRevision: digest.revision,
      summary: null,
      plots: {},
      fieldErrors: {},
      banner: null,
      evppi: { status: "idle", result: null, error: null },
    });
  }

  setK(k: number): void {
    this.patch({ k });
  }

  setPlotKinds(kinds: string[]): void {
    this.patch({ plotKinds: kinds });
  }

  setPending(pending: boolean): void {
    this.patch({ pendingMutation: pending });
  }

  /** Mutation acknowledgements always advance the revision. */
  acceptDigest(digest: SessionDigest): void {
    this.patch({
      digest,
      lastRevision: Math.max(this.state.lastRevision, digest.revision),
      fieldErrors: {},
      banner: null,
    });
  }

  /** Returns false (and changes nothing) when the response is stale. */
  acceptSummary(resp: SummaryResponse): boolean {
    if (resp.revision < this.state.lastRevision) return false;
    this.patch({
      summary: resp,
      lastRevision: Math.max(this.state.lastRevision, resp.revision),
    });
    return true;
  }

  /** Returns false (and changes nothing) when the response is stale. */
  acceptPlot(kind: string, resp: PlotResponse): boolean {
    if (resp.revision < this.state.lastRevision) return false;
    this.patch({
      plots: { ...this.state.plots, [kind]: resp },
      lastRevision: Math.max(this.state.lastRevision, resp.revision),
    });
    return true;
  }

  setFieldErrors(errors: Record<string, string>): void {
    this.patch({ fieldErrors: errors });
  }

  setBanner(message: string | null): void {
    this.patch({ banner: message });
  }

  setEvppi(view: EvppiView): void {
    this.patch({ evppi: view });
  }
}
