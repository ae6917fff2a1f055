// Scripted stand-in for the session service. Each test installs a script of
// recorded request/response steps (see scripts/record_fixtures.py); the mock
// serves them strictly in order and records what the client actually sent.
// Mismatches are collected rather than thrown through the client's error
// handling, so assertClean() at the end of a test reports them faithfully.

export interface ScriptStep {
  method: string;
  path: string;
  body?: unknown;
  status?: number;
  response?: unknown;
  /** Simulate the connection dying instead of answering. */
  networkError?: boolean;
}

export interface SentRequest {
  method: string;
  path: string;
  body: unknown;
}

export const BASE_URL = "http://svc.test";

function stable(value: unknown): string {
  if (Array.isArray(value)) {
    return `[${value.map(stable).join(",")}]`;
  }
  if (value !== null && typeof value === "object") {
    const entries = Object.entries(value as Record<string, unknown>)
      .sort(([a], [b]) => (a < b ? -1 : 1))
      .map(([k, v]) => `${JSON.stringify(k)}:${stable(v)}`);
    return `{${entries.join(",")}}`;
  }
  return JSON.stringify(value);
}

export class ScriptedService {
  readonly sent: SentRequest[] = [];
  readonly problems: string[] = [];
  private cursor = 0;

  constructor(private readonly script: ScriptStep[]) {}

  install(): this {
    globalThis.fetch = (async (input: RequestInfo | URL, init?: RequestInit) => {
      const url = String(input);
      if (!url.startsWith(BASE_URL)) {
        this.problems.push(`request to unexpected host: ${url}`);
        throw new TypeError("fetch failed");
      }
      const path = url.slice(BASE_URL.length);
      const method = init?.method ?? "GET";
      const body = typeof init?.body === "string" ? JSON.parse(init.body) : undefined;
      this.sent.push({ method, path, body });

      const step = this.script[this.cursor];
      if (!step) {
        this.problems.push(`unscripted request: ${method} ${path}`);
        throw new TypeError("fetch failed");
      }
      this.cursor += 1;
      if (step.method !== method || step.path !== path) {
        this.problems.push(
          `expected ${step.method} ${step.path}, got ${method} ${path}`,
        );
      } else if (step.body !== undefined && stable(step.body) !== stable(body)) {
        this.problems.push(
          `body mismatch on ${method} ${path}: expected ${stable(step.body)}, got ${stable(body)}`,
        );
      }
      if (step.networkError) {
        throw new TypeError("fetch failed");
      }
      const status = step.status ?? 200;
      const payload = JSON.stringify(step.response ?? null);
      return {
        ok: status >= 200 && status < 300,
        status,
        statusText: `status ${status}`,
        json: async () => JSON.parse(payload),
        text: async () => payload,
      } as unknown as Response;
    }) as typeof fetch;
    return this;
  }

  get consumed(): number {
    return this.cursor;
  }

  /** Fail loudly if anything went off-script or the script has leftovers. */
  assertClean(): void {
    if (this.problems.length > 0) {
      throw new Error(`scripted service problems:\n${this.problems.join("\n")}`);
    }
    if (this.cursor !== this.script.length) {
      throw new Error(`script not fully consumed: ${this.cursor}/${this.script.length}`);
    }
  }
}

/** Load a recorded fixture's steps. */
export function fixtureSteps(fixture: { steps: ScriptStep[] }): ScriptStep[] {
  return fixture.steps;
}
