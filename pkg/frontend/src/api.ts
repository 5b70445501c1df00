// Thin fetch wrapper. 422 responses become ApiError with field-level
// messages so forms can surface them inline; other failures carry status 0
// (network) or the HTTP status.

import type {
  CreateSessionBody,
  ExtensionBody,
  JobResponse,
  PatchBody,
  PlotResponse,
  SessionDigest,
  SummaryResponse,
} from "./types.js";

export interface FieldIssue {
  loc: (string | number)[];
  msg: string;
}

export class ApiError extends Error {
  status: number;
  detail: FieldIssue[];

  constructor(status: number, detail: FieldIssue[], message?: string) {
    super(message ?? `API error ${status}`);
    this.status = status;
    this.detail = detail;
  }

  /** Map of form-field name (last body path element) to message. */
  fieldErrors(): Record<string, string> {
    const out: Record<string, string> = {};
    for (const issue of this.detail) {
      const path = issue.loc.filter((p) => p !== "body");
      const key = String(path[path.length - 1] ?? "form");
      out[key] = issue.msg;
    }
    return out;
  }
}

async function parseError(resp: Response): Promise<ApiError> {
  let detail: FieldIssue[] = [];
  try {
    const body = await resp.json();
    if (Array.isArray(body.detail)) {
      detail = body.detail;
    } else if (typeof body.detail === "string") {
      detail = [{ loc: ["body"], msg: body.detail }];
    }
  } catch {
    detail = [{ loc: ["body"], msg: resp.statusText }];
  }
  return new ApiError(resp.status, detail);
}

export class ApiClient {
  constructor(private baseUrl: string = "http://127.0.0.1:8350") {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    headers?: Record<string, string>,
  ): Promise<T> {
    let resp: Response;
    try {
      resp = await fetch(this.baseUrl + path, {
        method,
        headers: { "Content-Type": "application/json", ...(headers ?? {}) },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError(0, [{ loc: [], msg: String(err) }], "network failure");
    }
    if (!resp.ok) {
      throw await parseError(resp);
    }
    return (await resp.json()) as T;
  }

  createSession(body: CreateSessionBody): Promise<SessionDigest> {
    return this.request("POST", "/sessions", body);
  }

  getSession(id: string): Promise<SessionDigest> {
    return this.request("GET", `/sessions/${id}`);
  }

  getSummary(id: string, k: number): Promise<SummaryResponse> {
    return this.request("GET", `/sessions/${id}/summary?k=${encodeURIComponent(k)}`);
  }

  patchSession(
    id: string,
    body: PatchBody,
    ifMatch?: number,
  ): Promise<SessionDigest> {
    const headers = ifMatch === undefined ? undefined : { "If-Match": String(ifMatch) };
    return this.request("PATCH", `/sessions/${id}`, body, headers);
  }

  postExtension(id: string, body: ExtensionBody): Promise<SessionDigest> {
    return this.request("POST", `/sessions/${id}/extensions`, body);
  }

  getPlot(
    id: string,
    kind: string,
    params: { k?: number; comparison?: number; variant?: string } = {},
  ): Promise<PlotResponse> {
    const query = new URLSearchParams();
    if (params.k !== undefined) query.set("k", String(params.k));
    if (params.comparison !== undefined) query.set("comparison", String(params.comparison));
    if (params.variant !== undefined) query.set("variant", params.variant);
    const qs = query.toString();
    return this.request("GET", `/sessions/${id}/plots/${kind}${qs ? "?" + qs : ""}`);
  }

  postEvppi(
    id: string,
    body: { params: string[]; k?: number },
  ): Promise<{ job_id: string }> {
    return this.request("POST", `/sessions/${id}/evppi`, body);
  }

  getJob(jobId: string): Promise<JobResponse> {
    return this.request("GET", `/jobs/${jobId}`);
  }
}
