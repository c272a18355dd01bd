/** Subgroup view: sliders plus a parallel-coordinates plot.
 *
 * Profile mode draws the focal unit as a bold red polyline and each peer as a
 * thin blue one; slider edits re-render only the red polyline, no server
 * traffic. Intervention mode hides peers, overlays translucent red range
 * rectangles per axis, and turns axis clicks into intervention requests; the
 * counterfactual response renders as a blue polyline beside the factual one.
 */

import {
  COUNTERFACTUAL_COLOR,
  FACTUAL_COLOR,
  NEIGHBOR_COLOR,
} from "./colors.js";
import type { IntervenePayload, Ranges } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface Scale {
  (value: number): number;
  invert: (pixel: number) => number;
  domain: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0;
  const scale = ((value: number) =>
    span === 0 ? (r0 + r1) / 2 : r0 + ((value - d0) / span) * (r1 - r0)) as Scale;
  scale.invert = (pixel) =>
    span === 0 ? d0 : d0 + ((pixel - r0) / (r1 - r0)) * span;
  scale.domain = domain;
  return scale;
}

export function axisXPositions(count: number, width: number, pad = 44): number[] {
  if (count === 1) return [width / 2];
  const step = (width - 2 * pad) / (count - 1);
  return Array.from({ length: count }, (_, i) => pad + i * step);
}

/** Per-axis domain covering every polyline vertex and range box, padded 5%. */
export function axisDomains(
  attributes: string[],
  rows: Record<string, number>[],
  ranges: Ranges | null,
): Map<string, [number, number]> {
  const domains = new Map<string, [number, number]>();
  for (const attribute of attributes) {
    let lo = Infinity;
    let hi = -Infinity;
    for (const row of rows) {
      const v = row[attribute];
      if (v !== undefined) {
        lo = Math.min(lo, v);
        hi = Math.max(hi, v);
      }
    }
    if (ranges && ranges[attribute]) {
      lo = Math.min(lo, ranges[attribute].min);
      hi = Math.max(hi, ranges[attribute].max);
    }
    if (!Number.isFinite(lo)) {
      lo = 0;
      hi = 1;
    }
    const pad = (hi - lo) * 0.05 || 0.5;
    domains.set(attribute, [lo - pad, hi + pad]);
  }
  return domains;
}

export function polylinePoints(
  values: Record<string, number>,
  attributes: string[],
  xs: number[],
  scales: Map<string, Scale>,
): string {
  return attributes
    .map((attribute, i) => {
      const y = scales.get(attribute)!(values[attribute]);
      return `${xs[i].toFixed(2)},${y.toFixed(2)}`;
    })
    .join(" ");
}

interface PcpLayout {
  attributes: string[];
  xs: number[];
  scales: Map<string, Scale>;
  width: number;
  height: number;
  top: number;
  bottom: number;
}

function buildLayout(
  attributes: string[],
  rows: Record<string, number>[],
  ranges: Ranges | null,
  width: number,
  height: number,
): PcpLayout {
  const top = 26;
  const bottom = height - 16;
  const xs = axisXPositions(attributes.length, width);
  const domains = axisDomains(attributes, rows, ranges);
  const scales = new Map<string, Scale>();
  for (const attribute of attributes) {
    scales.set(attribute, linearScale(domains.get(attribute)!, [bottom, top]));
  }
  return { attributes, xs, scales, width, height, top, bottom };
}

function drawAxes(
  svg: SVGSVGElement,
  layout: PcpLayout,
  highlighted: string | null,
): void {
  layout.attributes.forEach((attribute, i) => {
    const x = layout.xs[i];
    const axis = document.createElementNS(SVG_NS, "line");
    axis.setAttribute("x1", String(x));
    axis.setAttribute("x2", String(x));
    axis.setAttribute("y1", String(layout.top));
    axis.setAttribute("y2", String(layout.bottom));
    axis.setAttribute("stroke", "#999");
    svg.appendChild(axis);

    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(x));
    label.setAttribute("y", "14");
    label.setAttribute("text-anchor", "middle");
    label.setAttribute("class", "axis-title");
    label.setAttribute(
      "fill",
      attribute === highlighted ? COUNTERFACTUAL_COLOR : "#333",
    );
    label.textContent = attribute;
    svg.appendChild(label);
  });
}

function drawPolyline(
  svg: SVGSVGElement,
  points: string,
  stroke: string,
  widthPx: number,
  cls: string,
): SVGPolylineElement {
  const line = document.createElementNS(SVG_NS, "polyline");
  line.setAttribute("points", points);
  line.setAttribute("fill", "none");
  line.setAttribute("stroke", stroke);
  line.setAttribute("stroke-width", String(widthPx));
  line.setAttribute("class", cls);
  svg.appendChild(line);
  return line;
}

export interface ProfileOptions {
  attributes: string[]; // treatments then outcome
  unitValues: Record<string, number>;
  neighborValues: Record<string, number>[];
  width?: number;
  height?: number;
  /** slider edits re-render the red polyline only; no requests are issued */
  onSliderChange?: (attribute: string, value: number) => void;
}

export function renderProfile(container: HTMLElement, options: ProfileOptions): void {
  const width = options.width ?? 720;
  const height = options.height ?? 320;
  container.textContent = "";

  const current = { ...options.unitValues };
  const layout = buildLayout(
    options.attributes,
    [current, ...options.neighborValues],
    null,
    width,
    height,
  );

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "pcp pcp-profile");
  drawAxes(svg, layout, null);
  for (const neighbor of options.neighborValues) {
    drawPolyline(
      svg,
      polylinePoints(neighbor, layout.attributes, layout.xs, layout.scales),
      NEIGHBOR_COLOR,
      1,
      "neighbor",
    );
  }
  const red = drawPolyline(
    svg,
    polylinePoints(current, layout.attributes, layout.xs, layout.scales),
    FACTUAL_COLOR,
    2.5,
    "factual",
  );
  container.appendChild(svg);

  const sliders = document.createElement("div");
  sliders.setAttribute("class", "sliders");
  for (const attribute of options.attributes) {
    const [lo, hi] = layout.scales.get(attribute)!.domain;
    const row = document.createElement("label");
    row.textContent = attribute;
    const input = document.createElement("input");
    input.type = "range";
    input.min = String(lo);
    input.max = String(hi);
    input.step = "any";
    input.value = String(current[attribute]);
    input.setAttribute("data-attribute", attribute);
    input.addEventListener("input", () => {
      current[attribute] = Number(input.value);
      red.setAttribute(
        "points",
        polylinePoints(current, layout.attributes, layout.xs, layout.scales),
      );
      options.onSliderChange?.(attribute, current[attribute]);
    });
    row.appendChild(input);
    sliders.appendChild(row);
  }
  container.appendChild(sliders);
}

export interface InterventionOptions {
  attributes: string[]; // treatments then outcome
  treatments: string[];
  unitValues: Record<string, number>;
  ranges: Ranges;
  counterfactual: IntervenePayload | null;
  neighborCount: number;
  maxNeighbors: number;
  width?: number;
  height?: number;
  onAxisClick: (attribute: string, value: number) => void;
  onNeighborCountChange: (n: number) => void;
}

export function renderIntervention(
  container: HTMLElement,
  options: InterventionOptions,
): void {
  const width = options.width ?? 720;
  const height = options.height ?? 320;
  container.textContent = "";

  const cfValues = options.counterfactual?.counterfactual ?? null;
  const rows = cfValues ? [options.unitValues, cfValues] : [options.unitValues];
  const layout = buildLayout(options.attributes, rows, options.ranges, width, height);
  const highlighted = options.counterfactual?.intervened_attribute ?? null;

  // N slider on the far left adjusts the subgroup and refetches it
  const nControl = document.createElement("label");
  nControl.setAttribute("class", "n-slider");
  nControl.textContent = `N = ${options.neighborCount}`;
  const nInput = document.createElement("input");
  nInput.type = "range";
  nInput.min = "1";
  nInput.max = String(options.maxNeighbors);
  nInput.step = "1";
  nInput.value = String(options.neighborCount);
  nInput.addEventListener("change", () =>
    options.onNeighborCountChange(Number(nInput.value)),
  );
  nControl.appendChild(nInput);
  container.appendChild(nControl);

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "pcp pcp-intervention");

  // translucent red rectangles span each axis's subgroup value range
  layout.attributes.forEach((attribute, i) => {
    const range = options.ranges[attribute];
    if (!range) return;
    const scale = layout.scales.get(attribute)!;
    const yHigh = scale(range.max);
    const yLow = scale(range.min);
    const rect = document.createElementNS(SVG_NS, "rect");
    rect.setAttribute("x", String(layout.xs[i] - 7));
    rect.setAttribute("width", "14");
    rect.setAttribute("y", String(Math.min(yHigh, yLow)));
    rect.setAttribute("height", String(Math.abs(yLow - yHigh)));
    rect.setAttribute("fill", "rgba(214, 39, 40, 0.18)");
    rect.setAttribute("class", "range-box");
    rect.setAttribute("data-attribute", attribute);
    svg.appendChild(rect);
  });

  drawAxes(svg, layout, highlighted);

  // clickable hit strip per treatment axis: click position -> raw value
  layout.attributes.forEach((attribute, i) => {
    if (!options.treatments.includes(attribute)) return;
    const scale = layout.scales.get(attribute)!;
    const strip = document.createElementNS(SVG_NS, "rect");
    strip.setAttribute("x", String(layout.xs[i] - 9));
    strip.setAttribute("width", "18");
    strip.setAttribute("y", String(layout.top));
    strip.setAttribute("height", String(layout.bottom - layout.top));
    strip.setAttribute("fill", "transparent");
    strip.setAttribute("class", "axis-hit");
    strip.setAttribute("data-attribute", attribute);
    strip.addEventListener("click", (event) => {
      const mouse = event as MouseEvent;
      const box = svg.getBoundingClientRect();
      const scaleY = box.height > 0 ? height / box.height : 1;
      const clickY = (mouse.clientY - box.top) * scaleY;
      options.onAxisClick(attribute, scale.invert(clickY));
    });
    svg.appendChild(strip);
  });

  drawPolyline(
    svg,
    polylinePoints(options.unitValues, layout.attributes, layout.xs, layout.scales),
    FACTUAL_COLOR,
    2.5,
    "factual",
  );
  if (cfValues) {
    drawPolyline(
      svg,
      polylinePoints(cfValues, layout.attributes, layout.xs, layout.scales),
      COUNTERFACTUAL_COLOR,
      2,
      "counterfactual",
    );
  }
  container.appendChild(svg);
}
