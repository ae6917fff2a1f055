import { ServiceClient } from "./api.js";
import { PlayController, WatchController } from "./app.js";
import type { SessionConfig } from "./types.js";

// Page bootstrap. Everything authoritative lives on the service; this file
// only builds chrome, wires events, and keeps the session id in the URL
// hash so a reload reconstructs the same screen.

function serviceBaseUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("service");
  if (fromQuery) {
    window.localStorage.setItem("hypsweep-service", fromQuery);
    return fromQuery;
  }
  return window.localStorage.getItem("hypsweep-service") ?? "http://localhost:8000";
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  id: string,
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  node.id = id;
  if (text) {
    node.textContent = text;
  }
  return node;
}

const client = new ServiceClient(serviceBaseUrl());

// ---- static chrome ----

const page = el("div", "page");
const header = el("header", "header");
header.append(el("h1", "title", "hypothesis sweep"));
const serviceNote = el("span", "service-note", `service: ${client.baseUrl}`);
header.append(serviceNote);
page.append(header);

const controls = el("div", "controls");
const modePick = el("select", "mode-pick") as HTMLSelectElement;
for (const [value, label] of [["play", "play (record demonstrations)"], ["watch", "watch an agent"]]) {
  const opt = document.createElement("option");
  opt.value = value;
  opt.textContent = label;
  modePick.append(opt);
}
const seedInput = el("input", "seed-input") as HTMLInputElement;
seedInput.type = "number";
seedInput.placeholder = "seed (blank = random)";
const agentInput = el("input", "agent-input") as HTMLInputElement;
agentInput.value = "oracle";
agentInput.setAttribute("list", "model-list");
const modelInput = el("input", "model-input") as HTMLInputElement;
modelInput.placeholder = "model name (mc, b8, ...)";
const newButton = el("button", "btn-new", "new session") as HTMLButtonElement;
controls.append(modePick, seedInput, agentInput, modelInput, newButton);
const modelList = el("datalist", "model-list");
controls.append(modelList);
page.append(controls);

const overlayBar = el("div", "overlay-bar");
const toggles: Record<string, HTMLInputElement> = {};
for (const [key, label] of [
  ["heatmap", "feature heatmap"],
  ["outlines", "hypothesis outlines"],
  ["occupancy", "occupancy shading"],
  ["beliefOnly", "belief-only mode"],
] as const) {
  const wrap = document.createElement("label");
  const box = document.createElement("input");
  box.type = "checkbox";
  box.id = `toggle-${key}`;
  wrap.append(box, document.createTextNode(` ${label}`));
  overlayBar.append(wrap);
  toggles[key] = box;
}
page.append(overlayBar);

const statusLine = el("div", "status-line");
const hypWrap = el("div", "hyp-wrap", "|H| = ");
const hypCount = el("span", "hyp-count");
hypWrap.append(hypCount);
const errorLine = el("div", "error-line");
errorLine.hidden = true;
const board = el("div", "board-root");
page.append(statusLine, hypWrap, errorLine, board);

const finalizePrompt = el("div", "finalize-prompt");
finalizePrompt.hidden = true;
const finalizeButton = el("button", "btn-finalize", "save demonstration") as HTMLButtonElement;
finalizePrompt.append(
  document.createTextNode("belief collapsed to one pose. store this game? "),
  finalizeButton,
);
const restartOffer = el("div", "restart-offer");
restartOffer.hidden = true;
const restartButton = el("button", "btn-restart", "play again") as HTMLButtonElement;
restartOffer.append(document.createTextNode("episode over. "), restartButton);
page.append(finalizePrompt, restartOffer);

const watchBar = el("div", "watch-bar");
const stepButton = el("button", "btn-step", "step") as HTMLButtonElement;
const autoButton = el("button", "btn-auto", "auto") as HTMLButtonElement;
const aterBadge = el("span", "ater-badge", "a_ter");
aterBadge.hidden = true;
watchBar.append(stepButton, autoButton, aterBadge);
const log = el("ol", "step-log");
page.append(watchBar, log);

document.body.append(page);

// ---- controllers ----

const play = new PlayController(client, {
  board,
  hypCount,
  statusLine,
  errorLine,
  finalizePrompt,
  finalizeButton,
  restartOffer,
  restartButton,
}, (id) => {
  window.location.hash = `play/${id}`;
});

const watch = new WatchController(client, {
  board,
  hypCount,
  statusLine,
  errorLine,
  stepButton,
  autoButton,
  aterBadge,
  log,
}, (id) => {
  window.location.hash = `watch/${id}/${agentInput.value}${modelInput.value ? "/" + modelInput.value : ""}`;
});

function activeController(): PlayController | WatchController {
  return modePick.value === "watch" ? watch : play;
}

function applyMode(): void {
  const watching = modePick.value === "watch";
  watchBar.hidden = !watching;
  log.hidden = !watching;
  agentInput.hidden = !watching;
  modelInput.hidden = !watching;
}

function sessionConfig(): SessionConfig {
  const config: SessionConfig = { mode: modePick.value === "watch" ? "agent-watch" : "human-demo" };
  if (seedInput.value !== "") {
    config.seed = Number(seedInput.value);
  }
  return config;
}

newButton.addEventListener("click", () => {
  const config = sessionConfig();
  if (modePick.value === "watch") {
    void watch.start(config, agentInput.value.trim(), modelInput.value.trim() || undefined);
  } else {
    void play.start(config);
  }
});
modePick.addEventListener("change", applyMode);
finalizeButton.addEventListener("click", () => void play.finalize());
restartButton.addEventListener("click", () => void play.restart());
stepButton.addEventListener("click", () => void watch.step());
let autoOn = false;
autoButton.addEventListener("click", () => {
  if (autoOn) {
    watch.stopAuto();
    autoOn = false;
    autoButton.textContent = "auto";
  } else {
    autoOn = true;
    autoButton.textContent = "pause";
    void watch.autoRun().finally(() => {
      autoOn = false;
      autoButton.textContent = "auto";
    });
  }
});
for (const [key, box] of Object.entries(toggles)) {
  box.checked = key === "heatmap" || key === "outlines";
  box.addEventListener("change", () => {
    activeController().setOverlays({ [key]: box.checked });
  });
}

void client.models().then((resp) => {
  modelList.replaceChildren(
    ...resp.models.map((m) => {
      const opt = document.createElement("option");
      opt.value = m.name;
      return opt;
    }),
  );
}).catch(() => {
  // model listing is a convenience; the page works without it
});

// ---- reload reconstruction ----

const hash = window.location.hash.replace(/^#/, "").split("/");
if (hash[0] === "play" && hash[1]) {
  modePick.value = "play";
  void play.attach(hash[1]).catch((err) => {
    errorLine.textContent = String(err);
    errorLine.hidden = false;
  });
} else if (hash[0] === "watch" && hash[1]) {
  modePick.value = "watch";
  if (hash[2]) {
    agentInput.value = hash[2];
  }
  if (hash[3]) {
    modelInput.value = hash[3];
  }
  void watch.attach(hash[1], agentInput.value, modelInput.value || undefined).catch((err) => {
    errorLine.textContent = String(err);
    errorLine.hidden = false;
  });
}
applyMode();
