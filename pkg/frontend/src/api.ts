import type {
  AgentStepResponse,
  CreateSessionResponse,
  FinalizeResponse,
  HealthResponse,
  ModelsResponse,
  OpenResponse,
  SessionConfig,
  TemplateMeta,
  View,
} from "./types.js";

/** Non-2xx service reply, carrying the HTTP status and the detail text. */
export class ServiceError extends Error {
  readonly status: number;
  readonly detail: string;

  constructor(status: number, detail: string) {
    super(`${status}: ${detail}`);
    this.name = "ServiceError";
    this.status = status;
    this.detail = detail;
  }
}

/**
 * Thin JSON client for the session service. The base URL is configuration,
 * not a constant: the same build can point at any service instance.
 */
export class ServiceClient {
  readonly baseUrl: string;

  constructor(baseUrl: string) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "content-type": "application/json" } };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
    }
    const resp = await fetch(this.baseUrl + path, init);
    if (!resp.ok) {
      let detail = resp.statusText;
      try {
        const payload = (await resp.json()) as { detail?: unknown };
        if (payload.detail !== undefined) {
          detail = typeof payload.detail === "string" ? payload.detail : JSON.stringify(payload.detail);
        }
      } catch {
        // keep the bare status text when the body is not JSON
      }
      throw new ServiceError(resp.status, detail);
    }
    return (await resp.json()) as T;
  }

  health(): Promise<HealthResponse> {
    return this.request("GET", "/health");
  }

  models(): Promise<ModelsResponse> {
    return this.request("GET", "/models");
  }

  createSession(config: SessionConfig): Promise<CreateSessionResponse> {
    return this.request("POST", "/sessions", config);
  }

  view(id: string): Promise<View> {
    return this.request("GET", `/sessions/${id}`);
  }

  template(id: string): Promise<TemplateMeta> {
    return this.request("GET", `/sessions/${id}/template`);
  }

  open(id: string, row: number, col: number): Promise<OpenResponse> {
    return this.request("POST", `/sessions/${id}/open`, { row, col });
  }

  agentStep(id: string, agent: string, model?: string): Promise<AgentStepResponse> {
    const body: { agent: string; model?: string } = { agent };
    if (model !== undefined) {
      body.model = model;
    }
    return this.request("POST", `/sessions/${id}/agent-step`, body);
  }

  finalize(id: string): Promise<FinalizeResponse> {
    return this.request("POST", `/sessions/${id}/finalize`);
  }
}
