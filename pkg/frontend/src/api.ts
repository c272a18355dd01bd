/** Typed client for the what-if API. All dashboard traffic flows through here,
 * so tests can count and stub every request by injecting a fetch function. */

import type {
  ConfigPayload,
  ErrorBody,
  GeoJson,
  GlobalShapPayload,
  IntervenePayload,
  InterventionRequest,
  LimePayload,
  NeighborsPayload,
  RecommendPayload,
  ShapPayload,
  UnitsPayload,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly base: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async parse<T>(response: Response): Promise<T> {
    if (!response.ok) {
      let body: ErrorBody | null = null;
      try {
        body = (await response.json()) as ErrorBody;
      } catch {
        // non-JSON error body: fall through to the generic error
      }
      throw new ApiError(
        body?.code ?? "http_error",
        body?.message ?? `HTTP ${response.status}`,
        response.status,
      );
    }
    return (await response.json()) as T;
  }

  private get<T>(path: string): Promise<T> {
    return this.fetchFn(this.base + path).then((r) => this.parse<T>(r));
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.fetchFn(this.base + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    }).then((r) => this.parse<T>(r));
  }

  config(): Promise<ConfigPayload> {
    return this.get("/api/config");
  }

  units(): Promise<UnitsPayload> {
    return this.get("/api/units");
  }

  geo(): Promise<GeoJson> {
    return this.get("/api/geo");
  }

  neighbors(unitId: string, n: number): Promise<NeighborsPayload> {
    return this.get(`/api/units/${encodeURIComponent(unitId)}/neighbors?n=${n}`);
  }

  intervene(request: InterventionRequest): Promise<IntervenePayload> {
    return this.post("/api/intervene", request);
  }

  lime(unitId: string, n: number): Promise<LimePayload> {
    return this.post("/api/explain/lime", { unit_id: unitId, n });
  }

  shap(unitId: string, n: number): Promise<ShapPayload> {
    return this.post("/api/explain/shap", { unit_id: unitId, n });
  }

  globalShap(): Promise<GlobalShapPayload> {
    return this.get("/api/explain/global");
  }

  recommend(unitId: string, n: number, target: number): Promise<RecommendPayload> {
    return this.post("/api/recommend", { unit_id: unitId, n, target });
  }
}
