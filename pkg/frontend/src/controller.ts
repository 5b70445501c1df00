// Orchestrates the store against the API: debounced slider refreshes,
// serialized mutations, extension posts and EVPPI job polling. Every catch
// path either surfaces field errors inline (422) or raises the retry banner
// (network) while keeping the acknowledged state untouched.

import { ApiClient, ApiError } from "./api.js";
import { parseNumericCsv } from "./csv.js";
import { debounce } from "./debounce.js";
import { ExplorerStore } from "./state.js";
import type { CreateSessionBody, ExtensionBody, PatchBody } from "./types.js";

export interface ControllerOptions {
  debounceMs?: number;
  pollMs?: number;
}

// plot kinds whose content depends on the current willingness to pay
const K_DEPENDENT = new Set(["ceplane", "ib-density", "contour2", "grid"]);

export class ExplorerController {
  private refreshAtK: () => void;
  private mutationChain: Promise<void> = Promise.resolve();
  private pollMs: number;

  constructor(
    private api: ApiClient,
    private store: ExplorerStore,
    options: ControllerOptions = {},
  ) {
    this.pollMs = options.pollMs ?? 300;
    this.refreshAtK = debounce(() => {
      void this.fetchSummaryAndKPlots();
    }, options.debounceMs ?? 150);
  }

  private handleError(err: unknown): void {
    if (err instanceof ApiError && err.status === 422) {
      this.store.setFieldErrors(err.fieldErrors());
    } else if (err instanceof ApiError && err.status === 0) {
      this.store.setBanner("network failure; check the server and retry");
    } else {
      this.store.setBanner(String(err instanceof Error ? err.message : err));
    }
  }

  async uploadDataset(
    effectsCsv: string,
    costsCsv: string,
    options: { ref?: number; kmax?: number; gridPoints?: number } = {},
  ): Promise<void> {
    let body: CreateSessionBody;
    try {
      const effects = parseNumericCsv(effectsCsv);
      const costs = parseNumericCsv(costsCsv);
      body = {
        effects: effects.rows,
        costs: costs.rows,
        ref: options.ref ?? (effects.header ? effects.header.length : effects.rows[0].length),
        kmax: options.kmax,
        grid_points: options.gridPoints,
      };
      if (effects.header) body.labels = effects.header;
    } catch (err) {
      this.store.setFieldErrors({ upload: String(err instanceof Error ? err.message : err) });
      return;
    }
    try {
      const digest = await this.api.createSession(body);
      this.store.startSession(digest, digest.kmax / 2);
      await this.fetchSummaryAndKPlots();
      await this.refreshPlots(this.store.state.plotKinds);
    } catch (err) {
      this.handleError(err);
    }
  }

  /** Slider movements collapse into a single (debounced) refresh. */
  setWtp(k: number): void {
    this.store.setK(k);
    this.refreshAtK();
  }

  private async fetchSummaryAndKPlots(): Promise<void> {
    const { sessionId, k, plotKinds } = this.store.state;
    if (!sessionId) return;
    try {
      const summary = await this.api.getSummary(sessionId, k);
      this.store.acceptSummary(summary);
      await this.refreshPlots(plotKinds.filter((kind) => K_DEPENDENT.has(kind)));
    } catch (err) {
      this.handleError(err);
    }
  }

  private async refreshPlots(kinds: string[]): Promise<void> {
    const { sessionId, k } = this.store.state;
    if (!sessionId) return;
    await Promise.all(
      kinds.map(async (kind) => {
        try {
          const resp = await this.api.getPlot(sessionId, kind, { k });
          this.store.acceptPlot(kind, resp);
        } catch (err) {
          this.handleError(err);
        }
      }),
    );
  }

  /** PATCH mutations are serialized: one in flight per session. */
  private mutate(body: PatchBody): Promise<void> {
    const run = async () => {
      const { sessionId, lastRevision } = this.store.state;
      if (!sessionId) return;
      this.store.setPending(true);
      try {
        const digest = await this.api.patchSession(sessionId, body, lastRevision);
        this.store.acceptDigest(digest);
        const summary = await this.api.getSummary(sessionId, this.store.state.k);
        this.store.acceptSummary(summary);
        await this.refreshPlots(this.store.state.plotKinds);
      } catch (err) {
        this.handleError(err);
      } finally {
        this.store.setPending(false);
      }
    };
    this.mutationChain = this.mutationChain.then(run);
    return this.mutationChain;
  }

  setComparators(indices: number[]): Promise<void> {
    return this.mutate({ comparisons: indices });
  }

  setReference(ref: number): Promise<void> {
    return this.mutate({ ref });
  }

  setKmax(kmax: number): Promise<void> {
    return this.mutate({ kmax });
  }

  private async extend(body: ExtensionBody, refresh: string[]): Promise<void> {
    const { sessionId } = this.store.state;
    if (!sessionId) return;
    try {
      const digest = await this.api.postExtension(sessionId, body);
      this.store.acceptDigest(digest);
      await this.refreshPlots(refresh.filter((k) => this.store.state.plotKinds.includes(k)));
    } catch (err) {
      this.handleError(err);
    }
  }

  submitRiskAversion(rValues: number[]): Promise<void> {
    return this.extend({ riskav: rValues }, ["eib", "evi"]);
  }

  submitShares(shares: number[]): Promise<void> {
    return this.extend({ shares }, ["evi"]);
  }

  enableSimultaneous(): Promise<void> {
    return this.extend({ multice: true }, ["ceac", "ceaf"]);
  }

  async runEvppi(params: string[], k?: number): Promise<void> {
    const { sessionId } = this.store.state;
    if (!sessionId) return;
    this.store.setEvppi({ status: "running", result: null, error: null });
    let jobId: string;
    try {
      const resp = await this.api.postEvppi(sessionId, { params, k });
      jobId = resp.job_id;
    } catch (err) {
      this.store.setEvppi({ status: "idle", result: null, error: null });
      this.handleError(err);
      return;
    }
    const poll = async (): Promise<void> => {
      let job;
      try {
        job = await this.api.getJob(jobId);
      } catch (err) {
        this.store.setEvppi({ status: "error", result: null, error: String(err) });
        return;
      }
      if (job.status === "running") {
        setTimeout(() => void poll(), this.pollMs);
        return;
      }
      if (job.status === "done" && job.result) {
        this.store.setEvppi({ status: "done", result: job.result, error: null });
      } else {
        this.store.setEvppi({ status: "error", result: null, error: job.error });
      }
    };
    await poll();
  }
}
