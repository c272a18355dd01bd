/** Payload shapes of the what-if API. Field names mirror the JSON exactly. */

export interface SchemaPayload {
  id_column: string;
  name_column: string | null;
  outcome: string;
  treatments: string[];
}

export interface Extent {
  min: number;
  max: number;
  midpoint: number;
}

export interface ConfigPayload {
  schema: SchemaPayload;
  attributes: string[];
  outcome: string;
  n_units: number;
  extent: Extent;
  defaults: {
    n_neighbors: number;
    grid_size: number;
    lsh: { tables: number; bits: number; seed: number };
    lime: { n_samples: number; kernel_width: number; seed: number };
    shap_background: string;
    global_background: number;
    seed: number;
  };
  geo: {
    configured: boolean;
    unmatched_features: string[];
    units_without_geometry: string[];
  };
}

export interface UnitSummary {
  id: string;
  name: string;
  outcome: number;
}

export interface UnitsPayload {
  units: UnitSummary[];
  extent: Extent;
}

export type Ranges = Record<string, { min: number; max: number }>;

export interface NeighborsPayload {
  center_id: string;
  n: number;
  neighbor_ids: string[];
  distances: number[];
  ranges: Ranges;
  /** raw attribute vectors keyed by unit id, center first */
  values: Record<string, Record<string, number>>;
}

export interface InterventionRequest {
  unit_id: string;
  n: number;
  attribute: string;
  value: number;
}

export interface IntervenePayload {
  unit_id: string;
  n: number;
  intervened_attribute: string;
  intervention_value: number;
  factual: Record<string, number>;
  counterfactual: Record<string, number>;
  changed: string[];
  ranges: Ranges;
}

export interface LimeBar {
  feature: string;
  contribution: number;
  direction: "positive" | "negative";
}

export interface LimePayload {
  unit_id: string;
  n: number;
  prediction: number;
  interval: { low: number; high: number };
  coefficients: Record<string, number>;
  intercept: number;
  n_samples: number;
  kernel_width: number;
  seed: number;
  degenerate: boolean;
  r_squared: number;
  bars: LimeBar[];
}

export interface WaterfallStep {
  feature: string;
  start: number;
  end: number;
}

export interface ShapPayload {
  unit_id: string;
  n: number;
  baseline: number;
  prediction: number;
  attributions: Record<string, number>;
  feature_values: Record<string, number>;
  waterfall: WaterfallStep[];
}

export interface GlobalShapPayload {
  features: string[];
  feature_order: string[];
  unit_ids: string[];
  matrix: number[][];
  feature_values: number[][];
  n_background: number;
  seed: number;
}

export interface Recommendation {
  attribute: string;
  value: number;
  predicted_outcome: number;
  distance: number;
}

export interface RecommendPayload {
  unit_id: string;
  n: number;
  target: number;
  grid_size: number;
  recommendations: Recommendation[];
}

export interface ErrorBody {
  code: string;
  message: string;
}

export interface GeoFeature {
  type: "Feature";
  properties: Record<string, unknown>;
  geometry: { type: string; coordinates: unknown };
}

export interface GeoJson {
  type: "FeatureCollection";
  features: GeoFeature[];
}
