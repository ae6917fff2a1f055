// Color mapping for the feature overlay. Scores arrive already normalized
// to [0, 1]; the mapping is alpha only, so a score of 1 is the maximum
// intensity and 0 is fully transparent. Values are never rescaled here.

const HEAT_RGB = "235, 106, 35";

export function heatColor(score: number): string {
  const v = Math.max(0, Math.min(1, score));
  return `rgba(${HEAT_RGB}, ${v})`;
}

/** Occupancy shading: fraction of hypotheses covering the cell. */
export function occupancyColor(fraction: number): string {
  const v = Math.max(0, Math.min(1, fraction));
  return `rgba(64, 112, 214, ${0.85 * v})`;
}
