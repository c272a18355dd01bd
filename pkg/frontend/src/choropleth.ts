/** Choropleth map: one SVG path per geographic unit, filled on the diverging
 * outcome scale, selected unit outlined thick red, peers highlighted. */

import { divergingColor } from "./colors.js";
import type { Extent, GeoFeature, GeoJson, UnitSummary } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export type Projector = (lon: number, lat: number) => [number, number];

type Ring = [number, number][];

function rings(feature: GeoFeature): Ring[] {
  const geometry = feature.geometry;
  if (geometry.type === "Polygon") {
    return geometry.coordinates as Ring[];
  }
  if (geometry.type === "MultiPolygon") {
    return (geometry.coordinates as Ring[][]).flat();
  }
  return [];
}

export function geoBounds(geo: GeoJson): [number, number, number, number] {
  let minLon = Infinity, minLat = Infinity, maxLon = -Infinity, maxLat = -Infinity;
  for (const feature of geo.features) {
    for (const ring of rings(feature)) {
      for (const [lon, lat] of ring) {
        minLon = Math.min(minLon, lon);
        minLat = Math.min(minLat, lat);
        maxLon = Math.max(maxLon, lon);
        maxLat = Math.max(maxLat, lat);
      }
    }
  }
  return [minLon, minLat, maxLon, maxLat];
}

export function projector(
  bounds: [number, number, number, number],
  width: number,
  height: number,
  pad = 8,
): Projector {
  const [minLon, minLat, maxLon, maxLat] = bounds;
  const spanLon = Math.max(maxLon - minLon, 1e-9);
  const spanLat = Math.max(maxLat - minLat, 1e-9);
  const scale = Math.min((width - 2 * pad) / spanLon, (height - 2 * pad) / spanLat);
  return (lon, lat) => [
    pad + (lon - minLon) * scale,
    height - pad - (lat - minLat) * scale, // latitude grows upward
  ];
}

export function featurePath(feature: GeoFeature, project: Projector): string {
  const parts: string[] = [];
  for (const ring of rings(feature)) {
    ring.forEach(([lon, lat], i) => {
      const [x, y] = project(lon, lat);
      parts.push(`${i === 0 ? "M" : "L"}${x.toFixed(2)},${y.toFixed(2)}`);
    });
    parts.push("Z");
  }
  return parts.join("");
}

export function featureId(feature: GeoFeature, idProperty = "id"): string | null {
  const raw = feature.properties?.[idProperty];
  return raw === undefined || raw === null ? null : String(raw);
}

export interface ChoroplethOptions {
  geo: GeoJson;
  units: UnitSummary[];
  extent: Extent;
  selectedId: string | null;
  peerIds: Set<string>;
  width?: number;
  height?: number;
  onSelect: (unitId: string) => void;
}

/** Render the map into `container`; returns unit ids that had no geometry
 * (shown by the caller in a non-blocking warning panel). */
export function renderChoropleth(
  container: HTMLElement,
  options: ChoroplethOptions,
): string[] {
  const width = options.width ?? 640;
  const height = options.height ?? 420;
  const byId = new Map(options.units.map((u) => [u.id, u]));

  container.textContent = "";
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "choropleth");

  const project = projector(geoBounds(options.geo), width, height);
  const covered = new Set<string>();

  for (const feature of options.geo.features) {
    const id = featureId(feature);
    const unit = id === null ? undefined : byId.get(id);
    const path = document.createElementNS(SVG_NS, "path");
    path.setAttribute("d", featurePath(feature, project));
    if (unit === undefined) {
      path.setAttribute("fill", "#d9d9d9");
    } else {
      covered.add(unit.id);
      path.setAttribute("fill", divergingColor(unit.outcome, options.extent));
      path.setAttribute("data-unit-id", unit.id);
      if (unit.id === options.selectedId) {
        path.setAttribute("stroke", "#d62728");
        path.setAttribute("stroke-width", "3");
        path.setAttribute("class", "selected");
      } else if (options.peerIds.has(unit.id)) {
        path.setAttribute("stroke", "#1f77b4");
        path.setAttribute("stroke-width", "1.8");
        path.setAttribute("class", "peer");
      } else {
        path.setAttribute("stroke", "#666666");
        path.setAttribute("stroke-width", "0.4");
      }
      const tooltip = document.createElementNS(SVG_NS, "title");
      tooltip.textContent = `${unit.id} ${unit.name}: ${unit.outcome}`;
      path.appendChild(tooltip);
      path.addEventListener("click", () => options.onSelect(unit.id));
    }
    svg.appendChild(path);
  }
  container.appendChild(svg);
  return options.units.filter((u) => !covered.has(u.id)).map((u) => u.id);
}
