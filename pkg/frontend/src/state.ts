/** Workflow state machine: map select -> subgroup profile -> explanation ->
 * intervention mode, with back-transitions and a recommendation panel.
 *
 * Every user-facing transition issues exactly one API call, and the view
 * state only changes after that call succeeds; a failed call surfaces its
 * error code and leaves the state exactly as it was. Per view ("subgroup",
 * "explanation", "intervention", "recommend") at most one request is live:
 * a newer action supersedes older in-flight responses, which are dropped.
 */

import { ApiClient, ApiError } from "./api.js";
import type {
  ConfigPayload,
  GlobalShapPayload,
  IntervenePayload,
  LimePayload,
  NeighborsPayload,
  RecommendPayload,
  ShapPayload,
  UnitsPayload,
} from "./types.js";

export type SubgroupMode = "profile" | "intervention";
export type ExplanationKind = "lime" | "shap_waterfall" | "shap_beeswarm" | "none";

export interface ViewState {
  selectedUnitId: string | null;
  neighborCount: number;
  subgroupMode: SubgroupMode;
  activeExplanation: ExplanationKind;
  pendingIntervention: { attribute: string; value: number } | null;
}

export interface DataSlots {
  config: ConfigPayload | null;
  units: UnitsPayload | null;
  subgroup: NeighborsPayload | null;
  lime: LimePayload | null;
  shap: ShapPayload | null;
  beeswarm: GlobalShapPayload | null;
  counterfactual: IntervenePayload | null;
  recommendations: RecommendPayload | null;
  lastError: { code: string; message: string } | null;
}

export function initialViewState(defaultNeighbors = 10): ViewState {
  return {
    selectedUnitId: null,
    neighborCount: defaultNeighbors,
    subgroupMode: "profile",
    activeExplanation: "none",
    pendingIntervention: null,
  };
}

/** Snap axis clicks to 2 decimals in raw units so request payloads reproduce. */
export function snapValue(value: number): number {
  return Math.round(value * 100) / 100;
}

type ViewKey = "subgroup" | "explanation" | "intervention" | "recommend";

export class WorkflowController {
  state: ViewState;
  readonly data: DataSlots = {
    config: null,
    units: null,
    subgroup: null,
    lime: null,
    shap: null,
    beeswarm: null,
    counterfactual: null,
    recommendations: null,
    lastError: null,
  };

  private readonly sequence: Record<ViewKey, number> = {
    subgroup: 0,
    explanation: 0,
    intervention: 0,
    recommend: 0,
  };

  constructor(
    private readonly client: ApiClient,
    private readonly onChange: () => void = () => {},
    defaultNeighbors = 10,
  ) {
    this.state = initialViewState(defaultNeighbors);
  }

  private notify(): void {
    this.onChange();
  }

  private fail(error: unknown): void {
    if (error instanceof ApiError) {
      this.data.lastError = { code: error.code, message: error.message };
    } else {
      this.data.lastError = { code: "network_error", message: String(error) };
    }
    this.notify();
  }

  /** True when this response is still the newest one for its view. */
  private fresh(view: ViewKey, token: number): boolean {
    return this.sequence[view] === token;
  }

  async bootstrap(config: ConfigPayload, units: UnitsPayload): Promise<void> {
    this.data.config = config;
    this.data.units = units;
    this.state = initialViewState(config.defaults.n_neighbors);
    this.notify();
  }

  /** Step 2: choosing a unit on the map loads its peer subgroup (one call). */
  async selectUnit(unitId: string): Promise<void> {
    const token = ++this.sequence.subgroup;
    try {
      const subgroup = await this.client.neighbors(unitId, this.state.neighborCount);
      if (!this.fresh("subgroup", token)) return;
      this.state = {
        ...this.state,
        selectedUnitId: unitId,
        subgroupMode: "profile",
        activeExplanation: "none",
        pendingIntervention: null,
      };
      this.data.subgroup = subgroup;
      this.data.lime = null;
      this.data.shap = null;
      this.data.counterfactual = null;
      this.data.recommendations = null;
      this.data.lastError = null;
      this.notify();
    } catch (error) {
      if (this.fresh("subgroup", token)) this.fail(error);
    }
  }

  /** The N slider refetches the subgroup; neighbor count commits on success. */
  async setNeighborCount(n: number): Promise<void> {
    if (this.state.selectedUnitId === null) {
      this.state = { ...this.state, neighborCount: n };
      this.notify();
      return;
    }
    const token = ++this.sequence.subgroup;
    try {
      const subgroup = await this.client.neighbors(this.state.selectedUnitId, n);
      if (!this.fresh("subgroup", token)) return;
      this.state = { ...this.state, neighborCount: n };
      this.data.subgroup = subgroup;
      this.data.counterfactual = null;
      this.data.lastError = null;
      this.notify();
    } catch (error) {
      if (this.fresh("subgroup", token)) this.fail(error);
    }
  }

  /** Step 3: Get Explanation (one call per toggle). */
  async requestExplanation(kind: Exclude<ExplanationKind, "none">): Promise<void> {
    if (this.state.selectedUnitId === null && kind !== "shap_beeswarm") return;
    const token = ++this.sequence.explanation;
    try {
      if (kind === "lime") {
        const lime = await this.client.lime(
          this.state.selectedUnitId as string,
          this.state.neighborCount,
        );
        if (!this.fresh("explanation", token)) return;
        this.data.lime = lime;
      } else if (kind === "shap_waterfall") {
        const shap = await this.client.shap(
          this.state.selectedUnitId as string,
          this.state.neighborCount,
        );
        if (!this.fresh("explanation", token)) return;
        this.data.shap = shap;
      } else {
        const beeswarm = await this.client.globalShap();
        if (!this.fresh("explanation", token)) return;
        this.data.beeswarm = beeswarm;
      }
      this.state = { ...this.state, activeExplanation: kind };
      this.data.lastError = null;
      this.notify();
    } catch (error) {
      if (this.fresh("explanation", token)) this.fail(error);
    }
  }

  /** Mode toggles are local: the subgroup is already loaded. */
  enterInterventionMode(): void {
    if (this.state.selectedUnitId === null) return;
    this.state = { ...this.state, subgroupMode: "intervention" };
    this.notify();
  }

  enterProfileMode(): void {
    this.state = { ...this.state, subgroupMode: "profile", pendingIntervention: null };
    this.notify();
  }

  /** Step 4: clicking a value on a treatment axis simulates the intervention. */
  async axisClick(attribute: string, rawValue: number): Promise<void> {
    const config = this.data.config;
    if (
      this.state.selectedUnitId === null ||
      this.state.subgroupMode !== "intervention" ||
      config === null ||
      !config.schema.treatments.includes(attribute)
    ) {
      return;
    }
    const value = snapValue(rawValue);
    const token = ++this.sequence.intervention;
    try {
      const result = await this.client.intervene({
        unit_id: this.state.selectedUnitId,
        n: this.state.neighborCount,
        attribute,
        value,
      });
      if (!this.fresh("intervention", token)) return;
      this.state = { ...this.state, pendingIntervention: { attribute, value } };
      this.data.counterfactual = result;
      this.data.lastError = null;
      this.notify();
    } catch (error) {
      if (this.fresh("intervention", token)) this.fail(error);
    }
  }

  async requestRecommendations(target: number): Promise<void> {
    if (this.state.selectedUnitId === null) return;
    const token = ++this.sequence.recommend;
    try {
      const recommendations = await this.client.recommend(
        this.state.selectedUnitId,
        this.state.neighborCount,
        target,
      );
      if (!this.fresh("recommend", token)) return;
      this.data.recommendations = recommendations;
      this.data.lastError = null;
      this.notify();
    } catch (error) {
      if (this.fresh("recommend", token)) this.fail(error);
    }
  }
}
