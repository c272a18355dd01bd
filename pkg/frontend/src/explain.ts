/** Explanation view: LIME diverging bars, SHAP waterfall, SHAP beeswarm.
 * Every rendered number comes straight from a payload field; the only client
 * work is positioning. */

import { BAR_NEGATIVE, BAR_POSITIVE, valueRampColor } from "./colors.js";
import { linearScale } from "./pcp.js";
import type { GlobalShapPayload, LimePayload, ShapPayload, WaterfallStep } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface WaterfallRow {
  feature: string;
  start: number;
  end: number;
  y: number;
}

export interface WaterfallLayout {
  rows: WaterfallRow[];
  /** value the last step lands on; equals the payload prediction */
  finalPosition: number;
  lo: number;
  hi: number;
}

export function waterfallLayout(
  steps: WaterfallStep[],
  baseline: number,
  rowHeight = 22,
): WaterfallLayout {
  let lo = baseline;
  let hi = baseline;
  const rows = steps.map((step, i) => {
    lo = Math.min(lo, step.start, step.end);
    hi = Math.max(hi, step.start, step.end);
    return { feature: step.feature, start: step.start, end: step.end, y: i * rowHeight };
  });
  const finalPosition = steps.length ? steps[steps.length - 1].end : baseline;
  return { rows, finalPosition, lo, hi };
}

export function renderWaterfall(container: HTMLElement, payload: ShapPayload): void {
  container.textContent = "";
  const width = 460;
  const rowHeight = 22;
  const layout = waterfallLayout(payload.waterfall, payload.baseline, rowHeight);
  const height = layout.rows.length * rowHeight + 40;
  const x = linearScale([layout.lo, layout.hi], [150, width - 20]);

  const header = document.createElement("div");
  header.setAttribute("class", "explain-header");
  header.textContent =
    `baseline ${payload.baseline} -> prediction ${payload.prediction}`;
  container.appendChild(header);

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "waterfall");
  for (const row of layout.rows) {
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", "4");
    label.setAttribute("y", String(row.y + 15));
    label.textContent = row.feature;
    svg.appendChild(label);

    const rect = document.createElementNS(SVG_NS, "rect");
    const x0 = x(row.start);
    const x1 = x(row.end);
    rect.setAttribute("x", String(Math.min(x0, x1)));
    rect.setAttribute("width", String(Math.max(Math.abs(x1 - x0), 0.5)));
    rect.setAttribute("y", String(row.y + 4));
    rect.setAttribute("height", String(rowHeight - 8));
    rect.setAttribute("fill", row.end >= row.start ? BAR_POSITIVE : BAR_NEGATIVE);
    rect.setAttribute("class", "waterfall-step");
    rect.setAttribute("data-feature", row.feature);
    svg.appendChild(rect);
  }
  // final position marker: where the cumulative walk ends (the prediction)
  const marker = document.createElementNS(SVG_NS, "line");
  const xFinal = x(layout.finalPosition);
  marker.setAttribute("x1", String(xFinal));
  marker.setAttribute("x2", String(xFinal));
  marker.setAttribute("y1", "0");
  marker.setAttribute("y2", String(height - 20));
  marker.setAttribute("stroke", "#333");
  marker.setAttribute("stroke-dasharray", "3,2");
  marker.setAttribute("class", "final-position");
  marker.setAttribute("data-value", String(layout.finalPosition));
  svg.appendChild(marker);
  container.appendChild(svg);
}

export function renderLimeBars(container: HTMLElement, payload: LimePayload): void {
  container.textContent = "";
  const readout = document.createElement("div");
  readout.setAttribute("class", "explain-header lime-readout");
  readout.textContent =
    `prediction ${payload.prediction} ` +
    `[${payload.interval.low}, ${payload.interval.high}]`;
  container.appendChild(readout);

  const width = 460;
  const rowHeight = 22;
  const height = payload.bars.length * rowHeight + 10;
  const largest = Math.max(...payload.bars.map((b) => Math.abs(b.contribution)), 1e-12);
  const mid = width / 2 + 40;
  const span = (width - mid - 20) / largest;

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "lime-bars");
  payload.bars.forEach((bar, i) => {
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", "4");
    label.setAttribute("y", String(i * rowHeight + 15));
    label.textContent = bar.feature;
    svg.appendChild(label);

    const rect = document.createElementNS(SVG_NS, "rect");
    const length = Math.abs(bar.contribution) * span;
    rect.setAttribute("x", String(bar.contribution >= 0 ? mid : mid - length));
    rect.setAttribute("width", String(Math.max(length, 0.5)));
    rect.setAttribute("y", String(i * rowHeight + 4));
    rect.setAttribute("height", String(rowHeight - 8));
    rect.setAttribute(
      "fill",
      bar.direction === "positive" ? BAR_POSITIVE : BAR_NEGATIVE,
    );
    rect.setAttribute("class", `lime-bar ${bar.direction}`);
    rect.setAttribute("data-feature", bar.feature);
    svg.appendChild(rect);
  });
  container.appendChild(svg);
}

/** Deterministic vertical jitter so beeswarm points spread without RNG. */
export function swarmOffset(index: number, rowHeight: number): number {
  return (((index * 37) % 13) - 6) * (rowHeight / 16);
}

export function renderBeeswarm(
  container: HTMLElement,
  payload: GlobalShapPayload,
): void {
  container.textContent = "";
  const width = 520;
  const rowHeight = 26;
  const height = payload.feature_order.length * rowHeight + 20;

  let largest = 1e-12;
  for (const row of payload.matrix) {
    for (const v of row) largest = Math.max(largest, Math.abs(v));
  }
  const x = linearScale([-largest, largest], [150, width - 16]);
  const featureAt = new Map(payload.features.map((f, i) => [f, i]));

  const columnExtents = payload.features.map((_, column) => {
    let lo = Infinity;
    let hi = -Infinity;
    for (const row of payload.feature_values) {
      lo = Math.min(lo, row[column]);
      hi = Math.max(hi, row[column]);
    }
    return [lo, hi] as [number, number];
  });

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "beeswarm");
  payload.feature_order.forEach((feature, rank) => {
    const column = featureAt.get(feature)!;
    const yCenter = rank * rowHeight + rowHeight / 2 + 10;

    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", "4");
    label.setAttribute("y", String(yCenter + 4));
    label.setAttribute("class", "beeswarm-row-label");
    label.textContent = feature;
    svg.appendChild(label);

    const [lo, hi] = columnExtents[column];
    payload.matrix.forEach((row, unitIndex) => {
      const point = document.createElementNS(SVG_NS, "circle");
      point.setAttribute("cx", String(x(row[column])));
      point.setAttribute("cy", String(yCenter + swarmOffset(unitIndex, rowHeight)));
      point.setAttribute("r", "1.6");
      const t = hi > lo
        ? (payload.feature_values[unitIndex][column] - lo) / (hi - lo)
        : 0.5;
      point.setAttribute("fill", valueRampColor(t));
      svg.appendChild(point);
    });
  });
  container.appendChild(svg);
}
