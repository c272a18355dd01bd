/** Dashboard bootstrap: load config/units/boundaries, then re-render the
 * three coordinated views from controller state on every change. */

import { ApiClient } from "./api.js";
import { renderChoropleth } from "./choropleth.js";
import { renderBeeswarm, renderLimeBars, renderWaterfall } from "./explain.js";
import { renderIntervention, renderProfile } from "./pcp.js";
import { renderRecommendPanel } from "./recommend.js";
import { WorkflowController } from "./state.js";
import type { GeoJson, UnitSummary } from "./types.js";

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function renderError(container: HTMLElement, error: { code: string; message: string } | null): void {
  container.textContent = error ? `${error.code}: ${error.message}` : "";
}

function renderWarnings(container: HTMLElement, missing: string[]): void {
  container.textContent = missing.length
    ? `no geometry for ${missing.length} unit(s): ${missing.slice(0, 8).join(", ")}` +
      (missing.length > 8 ? ", ..." : "")
    : "";
}

export async function start(apiBase: string): Promise<WorkflowController> {
  const client = new ApiClient(apiBase);
  const [config, units] = await Promise.all([client.config(), client.units()]);
  let geo: GeoJson = { type: "FeatureCollection", features: [] };
  if (config.geo.configured) {
    geo = await client.geo();
  }

  const unitById = new Map<string, UnitSummary>(units.units.map((u) => [u.id, u]));

  const controller: WorkflowController = new WorkflowController(
    client,
    () => render(),
    config.defaults.n_neighbors,
  );

  function render(): void {
    const state = controller.state;
    const data = controller.data;

    renderError(el("error-panel"), data.lastError);

    const peerIds = new Set(data.subgroup?.neighbor_ids ?? []);
    const missing = renderChoropleth(el("map"), {
      geo,
      units: units.units,
      extent: units.extent,
      selectedId: state.selectedUnitId,
      peerIds,
      onSelect: (unitId) => void controller.selectUnit(unitId),
    });
    renderWarnings(el("map-warnings"), missing);

    const subgroupPane = el("subgroup");
    const modeButton = el("mode-toggle") as HTMLButtonElement;
    modeButton.disabled = state.selectedUnitId === null;
    modeButton.textContent =
      state.subgroupMode === "profile" ? "intervention mode" : "profile mode";

    if (state.selectedUnitId === null || data.subgroup === null) {
      subgroupPane.textContent = "select a unit on the map";
    } else {
      const center = unitById.get(state.selectedUnitId);
      el("subgroup-title").textContent =
        `${center?.name ?? state.selectedUnitId} and its ${data.subgroup.n} peers`;
      const unitValues = data.subgroup.values[state.selectedUnitId];
      if (state.subgroupMode === "profile") {
        renderProfile(subgroupPane, {
          attributes: config.attributes,
          unitValues,
          neighborValues: data.subgroup.neighbor_ids.map(
            (id) => data.subgroup!.values[id],
          ),
        });
      } else {
        renderIntervention(subgroupPane, {
          attributes: config.attributes,
          treatments: config.schema.treatments,
          unitValues,
          ranges: data.subgroup.ranges,
          counterfactual: data.counterfactual,
          neighborCount: state.neighborCount,
          maxNeighbors: Math.min(200, config.n_units - 1),
          onAxisClick: (attribute, value) =>
            void controller.axisClick(attribute, value),
          onNeighborCountChange: (n) => void controller.setNeighborCount(n),
        });
      }
    }

    const explanationPane = el("explanation");
    if (state.activeExplanation === "lime" && data.lime) {
      renderLimeBars(explanationPane, data.lime);
    } else if (state.activeExplanation === "shap_waterfall" && data.shap) {
      renderWaterfall(explanationPane, data.shap);
    } else if (state.activeExplanation === "shap_beeswarm" && data.beeswarm) {
      renderBeeswarm(explanationPane, data.beeswarm);
    } else {
      explanationPane.textContent = "no explanation requested";
    }

    renderRecommendPanel(el("recommend"), data.recommendations, (target) =>
      void controller.requestRecommendations(target),
    );
  }

  el("lime-button").addEventListener("click", () =>
    void controller.requestExplanation("lime"),
  );
  el("shap-button").addEventListener("click", () =>
    void controller.requestExplanation("shap_waterfall"),
  );
  el("beeswarm-button").addEventListener("click", () =>
    void controller.requestExplanation("shap_beeswarm"),
  );
  el("mode-toggle").addEventListener("click", () => {
    if (controller.state.subgroupMode === "profile") {
      controller.enterInterventionMode();
    } else {
      controller.enterProfileMode();
    }
  });

  await controller.bootstrap(config, units);
  return controller;
}

declare global {
  interface Window {
    peercfStart?: typeof start;
  }
}

if (typeof document !== "undefined" && document.getElementById("map")) {
  const params = new URLSearchParams(window.location.search);
  const base = params.get("api") ?? "http://127.0.0.1:8000";
  void start(base);
}
if (typeof window !== "undefined") {
  window.peercfStart = start;
}
