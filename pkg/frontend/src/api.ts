/** Typed client for the glyphdsl session service. The UI talks to the
 * engine exclusively through these endpoints. */

export type SlotKind = "targetId" | "number" | "color" | "freeString";

export interface SlotData {
  slotId: string;
  kind: SlotKind;
  currentValue: string | number;
  choices?: string[];
  derived?: boolean;
}

export interface ProposalData {
  outcome: "proposal";
  operation: Record<string, unknown>;
  slots: SlotData[];
  explanation: string;
  template: string;
}

export interface SuggestionData {
  outcome: "suggestion";
  message: string;
  exampleCommands: string[];
}

export type ParseResultData = ProposalData | SuggestionData;

export interface OpsResponse {
  version: number;
  warnings: string[];
}

export interface PreviewResponse {
  svg: string;
  etag: string;
  notModified: boolean;
}

export interface ApiErrorBody {
  error: string;
  message: string;
  index?: number;
}

export class ApiError extends Error {
  readonly status: number;
  readonly body: ApiErrorBody | null;

  constructor(status: number, body: ApiErrorBody | null) {
    super(body ? `${body.error}: ${body.message}` : `HTTP ${status}`);
    this.status = status;
    this.body = body;
  }
}

type FetchFn = typeof fetch;

async function readError(resp: Response): Promise<ApiError> {
  let body: ApiErrorBody | null = null;
  try {
    body = (await resp.json()) as ApiErrorBody;
  } catch {
    body = null;
  }
  return new ApiError(resp.status, body);
}

export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchFn;

  constructor(base = "", fetchFn: FetchFn = fetch) {
    this.base = base.replace(/\/$/, "");
    this.fetchFn = fetchFn;
  }

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(this.base + path, init);
    if (!resp.ok) {
      throw await readError(resp);
    }
    return (await resp.json()) as T;
  }

  createSession(initialDocument?: unknown): Promise<{ sessionId: string }> {
    return this.json("/sessions", {
      method: "POST",
      body: initialDocument === undefined ? "" : JSON.stringify(initialDocument),
    });
  }

  postOps(sessionId: string, ops: unknown[]): Promise<OpsResponse> {
    return this.json(`/sessions/${sessionId}/ops`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(ops),
    });
  }

  postNl(sessionId: string, text: string, selection?: string | null): Promise<ParseResultData> {
    const body: Record<string, unknown> = { text };
    if (selection) {
      body.selection = selection;
    }
    return this.json(`/sessions/${sessionId}/nl`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  confirmNl(sessionId: string,
            overrides: Record<string, string | number>): Promise<{ version: number }> {
    return this.json(`/sessions/${sessionId}/nl/confirm`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ slotOverrides: overrides }),
    });
  }

  getDocument(sessionId: string): Promise<Record<string, unknown>> {
    return this.json(`/sessions/${sessionId}/document`);
  }

  exportBundle(sessionId: string): Promise<{ svg: string; gdsl: unknown }> {
    return this.json(`/sessions/${sessionId}/export`);
  }

  /** Conditional preview fetch: pass the last ETag to get a cheap 304. */
  async fetchPreview(sessionId: string, annotate: boolean,
                     etag?: string | null): Promise<PreviewResponse> {
    const headers: Record<string, string> = {};
    if (etag) {
      headers["If-None-Match"] = etag;
    }
    const suffix = annotate ? "?annotate=1" : "";
    const resp = await this.fetchFn(
      `${this.base}/sessions/${sessionId}/preview.svg${suffix}`, { headers });
    if (resp.status === 304) {
      return { svg: "", etag: etag ?? "", notModified: true };
    }
    if (!resp.ok) {
      throw await readError(resp);
    }
    return {
      svg: await resp.text(),
      etag: resp.headers.get("ETag") ?? "",
      notModified: false,
    };
  }
}
