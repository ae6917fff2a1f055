import { ServiceClient, ServiceError } from "./api.js";
import { DEFAULT_OVERLAYS, renderBoard } from "./board.js";
import type { OverlayOptions } from "./board.js";
import { TERMINAL_ACTION } from "./types.js";
import type {
  AgentStepResponse,
  FinalizeResponse,
  SessionConfig,
  TemplateMeta,
  View,
} from "./types.js";

// Controllers own no game state. They cache the latest service view and
// template purely as render input; attach(id) rebuilds the same screen
// from GET /sessions/{id} after a reload.

export interface StatusElements {
  board: HTMLElement;
  hypCount: HTMLElement;
  statusLine: HTMLElement;
  errorLine: HTMLElement;
}

export interface PlayElements extends StatusElements {
  finalizePrompt: HTMLElement;
  finalizeButton: HTMLButtonElement;
  restartOffer: HTMLElement;
  restartButton: HTMLButtonElement;
}

export interface WatchElements extends StatusElements {
  stepButton: HTMLButtonElement;
  autoButton: HTMLButtonElement;
  aterBadge: HTMLElement;
  log: HTMLElement;
}

function describeError(err: unknown): string {
  if (err instanceof ServiceError) {
    return `${err.status}: ${err.detail}`;
  }
  return String(err);
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

/** One line per agent step, built from the response payload alone. */
export function transcriptLine(resp: AgentStepResponse): string {
  if (resp.failure) {
    return `failure=${resp.failure.reason}`;
  }
  const decision = resp.decision;
  if (!decision) {
    return "failure=unknown";
  }
  if (decision.action === TERMINAL_ACTION) {
    return `action=${TERMINAL_ACTION} target=none`;
  }
  const target = decision.target;
  const at = target ? `${target[0]},${target[1]}` : "none";
  return `action=${decision.action} target=${at} outcome=${resp.outcome}`;
}

abstract class SessionController<E extends StatusElements> {
  id: string | null = null;
  overlays: OverlayOptions = { ...DEFAULT_OVERLAYS };

  protected view: View | null = null;
  protected template: TemplateMeta | null = null;

  constructor(
    protected readonly client: ServiceClient,
    protected readonly els: E,
    protected readonly onSession?: (id: string) => void,
  ) {}

  get currentView(): View | null {
    return this.view;
  }

  setOverlays(partial: Partial<OverlayOptions>): void {
    this.overlays = { ...this.overlays, ...partial };
    this.render();
  }

  protected showError(err: unknown): void {
    this.els.errorLine.textContent = describeError(err);
    this.els.errorLine.hidden = false;
  }

  protected clearError(): void {
    this.els.errorLine.textContent = "";
    this.els.errorLine.hidden = true;
  }

  protected adopt(id: string, view: View, template: TemplateMeta): void {
    this.id = id;
    this.view = view;
    this.template = template;
    this.onSession?.(id);
    this.clearError();
    this.render();
  }

  protected render(): void {
    if (!this.view || !this.template) {
      return;
    }
    renderBoard(this.els.board, this.view, this.template, this.overlays, this.renderExtras());
    this.els.hypCount.textContent = String(this.view.hyp_count);
    this.renderStatus(this.view);
  }

  protected renderExtras(): Parameters<typeof renderBoard>[4] {
    return {};
  }

  protected abstract renderStatus(view: View): void;
}

export class PlayController extends SessionController<PlayElements> {
  private config: SessionConfig = { mode: "human-demo" };
  private mineCell: [number, number] | null = null;
  private finalized: FinalizeResponse | null = null;

  async start(config?: SessionConfig): Promise<string> {
    if (config) {
      this.config = { ...config, mode: "human-demo" };
    }
    this.mineCell = null;
    this.finalized = null;
    const created = await this.client.createSession(this.config);
    this.adopt(created.id, created.view, created.template);
    return created.id;
  }

  /** Rebuild the screen for an existing session, e.g. after a reload. */
  async attach(id: string): Promise<void> {
    const [view, template] = await Promise.all([
      this.client.view(id),
      this.client.template(id),
    ]);
    this.mineCell = null;
    this.finalized = null;
    this.adopt(id, view, template);
  }

  /** Click handler for unopened cells. Opened cells never reach this far,
   * and a second guard here keeps stale clicks from issuing requests. */
  async onCellClick(r: number, c: number): Promise<void> {
    const view = this.view;
    if (!this.id || !view || view.status !== "running") {
      return;
    }
    if (view.opened.some((cell) => cell.r === r && cell.c === c)) {
      return;
    }
    let resp;
    try {
      resp = await this.client.open(this.id, r, c);
    } catch (err) {
      this.showError(err);
      return;
    }
    this.clearError();
    if (resp.outcome === "mine") {
      this.mineCell = [r, c];
    }
    this.view = resp.view;
    this.render();
  }

  async finalize(): Promise<FinalizeResponse | null> {
    if (!this.id) {
      return null;
    }
    try {
      this.finalized = await this.client.finalize(this.id);
    } catch (err) {
      this.showError(err);
      return null;
    }
    this.clearError();
    this.render();
    return this.finalized;
  }

  /** Fresh session with the same configuration, offered after a mine.
   * The dead session is finalized first so the service logs the failure. */
  async restart(): Promise<string> {
    if (this.id && this.view && this.view.status !== "running" && !this.finalized) {
      try {
        this.finalized = await this.client.finalize(this.id);
      } catch {
        // best effort: a lost session still restarts cleanly
      }
    }
    return this.start(this.config);
  }

  protected override renderExtras() {
    return {
      mineCell: this.mineCell,
      onCellClick: (r: number, c: number) => {
        void this.onCellClick(r, c);
      },
    };
  }

  protected override renderStatus(view: View): void {
    const line = this.els.statusLine;
    line.classList.remove("celebrate");
    this.els.finalizePrompt.hidden = true;
    this.els.restartOffer.hidden = true;
    if (view.status === "running") {
      line.textContent = `playing, step ${view.steps}`;
    } else if (view.status === "success") {
      line.classList.add("celebrate");
      line.textContent = `|H| = 1, object located in ${view.steps} steps`;
      if (this.finalized) {
        line.textContent += `, saved ${this.finalized.stored} demonstration rows`;
      } else {
        this.els.finalizePrompt.hidden = false;
      }
    } else if (view.status === "failed_mine") {
      line.textContent = "mine opened, episode failed";
      this.els.restartOffer.hidden = false;
    } else {
      line.textContent = `episode failed (${view.status})`;
      this.els.restartOffer.hidden = false;
    }
  }
}

export class WatchController extends SessionController<WatchElements> {
  readonly transcript: string[] = [];
  autoDelayMs = 600;

  private agent = "oracle";
  private model: string | undefined;
  private lastScores: (number | null)[] | null = null;
  private scoreOrigin: [number, number] | null = null;
  private failureText: string | null = null;
  private terminal = false;
  private autoRunning = false;
  private stopRequested = false;

  async start(config: SessionConfig, agent: string, model?: string): Promise<string> {
    const created = await this.client.createSession({ ...config, mode: "agent-watch" });
    this.agent = agent;
    this.model = model;
    this.resetRun();
    this.adopt(created.id, created.view, created.template);
    return created.id;
  }

  async attach(id: string, agent: string, model?: string): Promise<void> {
    const [view, template] = await Promise.all([
      this.client.view(id),
      this.client.template(id),
    ]);
    this.agent = agent;
    this.model = model;
    this.resetRun();
    this.adopt(id, view, template);
  }

  private resetRun(): void {
    this.transcript.length = 0;
    this.lastScores = null;
    this.scoreOrigin = null;
    this.failureText = null;
    this.terminal = false;
    this.stopRequested = false;
  }

  async step(): Promise<AgentStepResponse | null> {
    const view = this.view;
    if (!this.id || !view || view.status !== "running" || this.terminal) {
      return null;
    }
    let resp: AgentStepResponse;
    try {
      resp = await this.client.agentStep(this.id, this.agent, this.model);
    } catch (err) {
      this.showError(err);
      return null;
    }
    this.clearError();
    this.transcript.push(transcriptLine(resp));
    this.lastScores = resp.decision?.scores ?? resp.failure?.scores ?? null;
    // scores were computed where the agent stood before this move
    this.scoreOrigin = [view.agent[0], view.agent[1]];
    this.failureText = resp.failure ? resp.failure.reason : null;
    if (resp.decision?.action === TERMINAL_ACTION) {
      this.terminal = true;
    }
    this.view = resp.view;
    this.render();
    return resp;
  }

  /** Step repeatedly until the run leaves the running state, a failure
   * arrives, or stopAuto() is called. */
  async autoRun(delayMs: number = this.autoDelayMs): Promise<void> {
    if (this.autoRunning) {
      return;
    }
    this.autoRunning = true;
    this.stopRequested = false;
    try {
      while (!this.stopRequested && this.view?.status === "running" && !this.terminal) {
        const resp = await this.step();
        if (!resp || resp.failure || resp.decision?.action === TERMINAL_ACTION) {
          break;
        }
        if (delayMs > 0) {
          await sleep(delayMs);
        }
      }
    } finally {
      this.autoRunning = false;
    }
  }

  stopAuto(): void {
    this.stopRequested = true;
  }

  protected override renderExtras() {
    return { scores: this.lastScores, scoreOrigin: this.scoreOrigin };
  }

  protected override renderStatus(view: View): void {
    const line = this.els.statusLine;
    line.classList.remove("celebrate");
    if (this.failureText !== null) {
      line.textContent = `failure: ${this.failureText}`;
    } else if (view.status === "success") {
      line.classList.add("celebrate");
      line.textContent = `|H| = 1, object located in ${view.steps} steps`;
    } else {
      line.textContent = `${this.agent} watching, step ${view.steps}`;
    }
    const frozen = this.terminal || view.status !== "running";
    this.els.stepButton.disabled = frozen;
    this.els.autoButton.disabled = frozen;
    this.els.aterBadge.hidden = !this.terminal;
    this.renderLog();
  }

  private renderLog(): void {
    const items = this.transcript.map((entry) => {
      const li = document.createElement("li");
      li.textContent = entry;
      return li;
    });
    this.els.log.replaceChildren(...items);
  }
}
