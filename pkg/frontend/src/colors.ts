/** Color scales. Every scale is a pure function of payload numbers; the hex
 * anchors are fixed so tests can assert exact endpoint colors. */

import type { Extent } from "./types.js";

export const MAP_LOW = "#008837"; // minimum outcome (green)
export const MAP_MID = "#ffffbf"; // neutral midpoint (light yellow)
export const MAP_HIGH = "#7b3294"; // maximum outcome (purple)
export const BAR_POSITIVE = "#e66101"; // raises the prediction (orange)
export const BAR_NEGATIVE = "#5e3c99"; // lowers the prediction (indigo)
export const FACTUAL_COLOR = "#d62728"; // focal unit polyline (red)
export const COUNTERFACTUAL_COLOR = "#1f77b4"; // counterfactual polyline (blue)
export const NEIGHBOR_COLOR = "#7fa8d9"; // peer polylines (thin blue)

function hexToRgb(hex: string): [number, number, number] {
  return [
    parseInt(hex.slice(1, 3), 16),
    parseInt(hex.slice(3, 5), 16),
    parseInt(hex.slice(5, 7), 16),
  ];
}

function rgbToHex(rgb: [number, number, number]): string {
  return (
    "#" + rgb.map((c) => Math.round(c).toString(16).padStart(2, "0")).join("")
  );
}

function mix(from: string, to: string, t: number): string {
  const a = hexToRgb(from);
  const b = hexToRgb(to);
  return rgbToHex([
    a[0] + (b[0] - a[0]) * t,
    a[1] + (b[1] - a[1]) * t,
    a[2] + (b[2] - a[2]) * t,
  ]);
}

/** Diverging green -> light-yellow -> purple ramp anchored at (min, midpoint, max). */
export function divergingColor(value: number, extent: Extent): string {
  const { min, max, midpoint } = extent;
  if (value <= min) return MAP_LOW;
  if (value >= max) return MAP_HIGH;
  if (value === midpoint) return MAP_MID;
  if (value < midpoint) {
    const span = midpoint - min;
    return span <= 0 ? MAP_MID : mix(MAP_LOW, MAP_MID, (value - min) / span);
  }
  const span = max - midpoint;
  return span <= 0 ? MAP_MID : mix(MAP_MID, MAP_HIGH, (value - midpoint) / span);
}

/** Indigo -> orange ramp for beeswarm points, t in [0, 1] (low -> high value). */
export function valueRampColor(t: number): string {
  const clamped = Math.max(0, Math.min(1, t));
  return mix(BAR_NEGATIVE, BAR_POSITIVE, clamped);
}
