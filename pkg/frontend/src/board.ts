import { heatColor, occupancyColor } from "./heat.js";
import { DIRECTION_ARROWS, DIRECTION_VECTORS } from "./types.js";
import type { TemplateMeta, View } from "./types.js";

// Board rendering is a pure projection of the service state view plus the
// static template geometry. Anything that smells like game logic (counts,
// legality, hypothesis filtering, scores) happens on the service.

export interface OverlayOptions {
  heatmap: boolean;
  outlines: boolean;
  occupancy: boolean;
  /** Hide counts and show only the heatmap, mimicking the classifier's view. */
  beliefOnly: boolean;
}

export interface RenderExtras {
  /** Cell revealed as a mine by the last move; presentation only. */
  mineCell?: readonly [number, number] | null;
  /** Score vector from the last agent step, drawn as arrows around the cell
   * the decision was made from. */
  scores?: (number | null)[] | null;
  /** Where the scored agent stood; defaults to the view's agent cell. */
  scoreOrigin?: readonly [number, number] | null;
  onCellClick?: (r: number, c: number) => void;
}

export const DEFAULT_OVERLAYS: OverlayOptions = {
  heatmap: true,
  outlines: true,
  occupancy: false,
  beliefOnly: false,
};

/**
 * Join each hypothesis anchor with the template offsets for its orientation.
 * Returns how many hypotheses cover each covered cell, keyed "r,c".
 */
export function footprintCounts(view: View, template: TemplateMeta): Map<string, number> {
  const counts = new Map<string, number>();
  for (const hyp of view.hypotheses) {
    const offsets = template.offsets[String(hyp.orient)] ?? [];
    for (const [dr, dc] of offsets) {
      const key = `${hyp.r + dr},${hyp.c + dc}`;
      counts.set(key, (counts.get(key) ?? 0) + 1);
    }
  }
  return counts;
}

function cellElement(
  view: View,
  covered: Map<string, number>,
  openedAt: Map<string, number>,
  opts: OverlayOptions,
  extras: RenderExtras,
  r: number,
  c: number,
): HTMLElement {
  const cell = document.createElement("div");
  cell.className = "cell";
  cell.dataset.r = String(r);
  cell.dataset.c = String(c);
  const key = `${r},${c}`;

  const count = openedAt.get(key);
  const isOpened = count !== undefined;
  if (isOpened) {
    cell.classList.add("opened");
    cell.setAttribute("aria-disabled", "true");
    if (!opts.beliefOnly) {
      cell.textContent = String(count);
    }
  } else {
    cell.classList.add("unopened");
    if (extras.onCellClick) {
      const handler = extras.onCellClick;
      cell.addEventListener("click", () => handler(r, c));
    }
  }

  if (view.agent[0] === r && view.agent[1] === c) {
    cell.classList.add("agent");
  }
  const mine = extras.mineCell;
  if (mine && mine[0] === r && mine[1] === c) {
    cell.classList.add("mine");
    cell.textContent = "\u{1F4A3}";
  }

  const score = view.feature[r * view.cols + c];
  cell.dataset.score = String(score);
  if (opts.heatmap || opts.beliefOnly) {
    cell.style.backgroundColor = heatColor(score);
  }

  const cover = covered.get(key);
  if (cover !== undefined) {
    cell.dataset.occ = String(cover);
    if (opts.outlines && !opts.beliefOnly) {
      cell.classList.add("hyp-outline");
    }
    if (opts.occupancy && !opts.beliefOnly && view.hyp_count > 0) {
      const shade = document.createElement("div");
      shade.className = "occ-shade";
      shade.style.backgroundColor = occupancyColor(cover / view.hyp_count);
      cell.appendChild(shade);
    }
  }
  return cell;
}

/**
 * Rebuild the grid under `root` from the given view. Arrows for the score
 * vector are appended after the cells in slot order, so their document
 * order matches the service payload order.
 */
export function renderBoard(
  root: HTMLElement,
  view: View,
  template: TemplateMeta,
  opts: OverlayOptions = DEFAULT_OVERLAYS,
  extras: RenderExtras = {},
): void {
  const covered = footprintCounts(view, template);
  const openedAt = new Map<string, number>();
  for (const cell of view.opened) {
    openedAt.set(`${cell.r},${cell.c}`, cell.count);
  }

  const grid = document.createElement("div");
  grid.className = "board";
  grid.style.gridTemplateColumns = `repeat(${view.cols}, var(--cell-size, 2rem))`;
  for (let r = 0; r < view.rows; r++) {
    for (let c = 0; c < view.cols; c++) {
      grid.appendChild(cellElement(view, covered, openedAt, opts, extras, r, c));
    }
  }

  const scores = extras.scores;
  if (scores) {
    const [ar, ac] = extras.scoreOrigin ?? view.agent;
    for (let dir = 0; dir < DIRECTION_VECTORS.length; dir++) {
      const score = scores[dir];
      if (score === null || score === undefined) {
        continue;
      }
      const [dr, dc] = DIRECTION_VECTORS[dir];
      if (ar + dr < 0 || ar + dr >= view.rows || ac + dc < 0 || ac + dc >= view.cols) {
        continue;
      }
      const arrow = document.createElement("div");
      arrow.className = "arrow";
      arrow.dataset.dir = String(dir);
      arrow.dataset.score = String(score);
      arrow.title = `${DIRECTION_ARROWS[dir]} ${score}`;
      arrow.textContent = DIRECTION_ARROWS[dir];
      arrow.style.gridRowStart = String(ar + dr + 1);
      arrow.style.gridColumnStart = String(ac + dc + 1);
      grid.appendChild(arrow);
    }
  }

  root.replaceChildren(grid);
}
