// Watch flow: stepping, auto-stepping, arrows, failure pauses, and the
// terminal badge, replayed against recorded agent sessions.

import { beforeEach, expect, it } from "vitest";

import { ServiceClient } from "../src/api.js";
import { WatchController, transcriptLine } from "../src/app.js";
import type { AgentStepResponse, SessionConfig, View } from "../src/types.js";
import { flush, watchElements } from "./dom.js";
import { BASE_URL, ScriptedService } from "./mock.js";
import type { ScriptStep } from "./mock.js";
import b8Fixture from "./fixtures/watch_b8.json";
import errorFixture from "./fixtures/watch_error.json";
import mcFixture from "./fixtures/watch_mc.json";
import oracleFixture from "./fixtures/watch_oracle.json";

const mcSteps = mcFixture.steps as ScriptStep[];
const oracleSteps = oracleFixture.steps as ScriptStep[];
const b8Steps = b8Fixture.steps as ScriptStep[];
const errorSteps = errorFixture.steps as ScriptStep[];

beforeEach(() => {
  document.body.innerHTML = "";
});

function controller(script: ScriptStep[]) {
  const svc = new ScriptedService(script).install();
  const els = watchElements();
  const watch = new WatchController(new ServiceClient(BASE_URL), els);
  return { svc, els, watch };
}

/** The service-side transcript, written directly from the recorded payloads. */
function recordedTranscript(steps: ScriptStep[]): string[] {
  return steps.map((step) => {
    const resp = step.response as AgentStepResponse;
    if (resp.failure) {
      return `failure=${resp.failure.reason}`;
    }
    const d = resp.decision!;
    if (d.action === 8) {
      return "action=8 target=none";
    }
    return `action=${d.action} target=${d.target![0]},${d.target![1]} outcome=${resp.outcome}`;
  });
}

it("a step renders score arrows in payload order at the origin cell", async () => {
  const { svc, els, watch } = controller(mcSteps);
  await watch.start(mcSteps[0].body as SessionConfig, "mc", "mc");
  const origin = (mcSteps[0].response as { view: View }).view.agent;

  const resp = await watch.step();
  expect(resp).not.toBeNull();
  const scores = resp!.decision!.scores!;
  const arrows = Array.from(els.board.querySelectorAll(".arrow")) as HTMLElement[];
  const scored = scores.slice(0, 8).map((s, i) => [s, i] as const).filter(([s]) => s !== null);
  expect(arrows.map((a) => a.dataset.dir)).toEqual(scored.map(([, i]) => String(i)));
  expect(arrows.map((a) => a.dataset.score)).toEqual(scored.map(([s]) => String(s)));
  const vectors = [[-1, 0], [-1, 1], [0, 1], [1, 1], [1, 0], [1, -1], [0, -1], [-1, -1]];
  for (const arrow of arrows) {
    const [dr, dc] = vectors[Number(arrow.dataset.dir)];
    expect(arrow.style.gridRowStart).toBe(String(origin[0] + dr + 1));
    expect(arrow.style.gridColumnStart).toBe(String(origin[1] + dc + 1));
  }

  expect(els.statusLine.textContent).toBe("mc watching, step 1");
  expect(els.hypCount.textContent).toBe(String(resp!.view.hyp_count));
  expect(watch.transcript).toEqual([transcriptLine(resp!)]);
  svc.assertClean();
});

it("auto-step reproduces the recorded service transcript and freezes at a_ter", async () => {
  const { svc, els, watch } = controller(oracleSteps);
  await watch.start(oracleSteps[0].body as SessionConfig, "oracle");
  expect(els.aterBadge.hidden).toBe(true);

  await watch.autoRun(0);
  expect(watch.transcript).toEqual(recordedTranscript(oracleSteps.slice(1)));
  const logLines = Array.from(els.log.querySelectorAll("li")).map((li) => li.textContent);
  expect(logLines).toEqual(watch.transcript);

  expect(els.aterBadge.hidden).toBe(false);
  expect(els.stepButton.disabled).toBe(true);
  expect(els.autoButton.disabled).toBe(true);
  expect(els.statusLine.classList.contains("celebrate")).toBe(true);

  // the controls are frozen: further steps never reach the wire
  const before = svc.sent.length;
  await watch.step();
  await watch.autoRun(0);
  expect(svc.sent.length).toBe(before);
  svc.assertClean();
});

it("a not-actionable failure pauses auto-step and is rendered verbatim", async () => {
  const { svc, els, watch } = controller(b8Steps);
  await watch.start(b8Steps[0].body as SessionConfig, "b8", "b8");

  await watch.autoRun(0);
  expect(watch.transcript).toEqual(["failure=not_actionable"]);
  expect(els.statusLine.textContent).toBe("failure: not_actionable");

  const failure = (b8Steps[1].response as AgentStepResponse).failure!;
  const arrows = Array.from(els.board.querySelectorAll(".arrow")) as HTMLElement[];
  const scored = failure.scores!.slice(0, 8).filter((s) => s !== null);
  expect(arrows.map((a) => a.dataset.score)).toEqual(scored.map((s) => String(s)));
  for (const s of scored) {
    expect(s!).toBeLessThanOrEqual(0);
  }

  // failed episode, so the controls freeze and nothing else is sent
  expect(els.stepButton.disabled).toBe(true);
  const before = svc.sent.length;
  await watch.autoRun(0);
  expect(svc.sent.length).toBe(before);
  svc.assertClean();
});

it("a service refusal shows inline and leaves the controls usable", async () => {
  const { svc, els, watch } = controller(errorSteps);
  await watch.start(errorSteps[0].body as SessionConfig, "mc", "missing");

  els.stepButton.addEventListener("click", () => void watch.step());
  els.stepButton.click();
  await flush();
  expect(els.errorLine.hidden).toBe(false);
  expect(els.errorLine.textContent).toBe("404: unknown model 'missing'");
  expect(els.stepButton.disabled).toBe(false);
  expect(watch.transcript).toEqual([]);
  svc.assertClean();
});
