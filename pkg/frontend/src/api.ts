import type {
  GeoPosition,
  HeatmapDocument,
  NearestStrongResponse,
  OperatorInfo,
  OperatorsResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(message: string, readonly status?: number) {
    super(message);
    this.name = "ApiError";
  }
}

export type HeatmapResult = { kind: "ok"; doc: HeatmapDocument } | { kind: "no-data" };

export function isAbort(err: unknown): boolean {
  return err instanceof DOMException && err.name === "AbortError";
}

/**
 * Thin typed client for the service. Each endpoint allows at most one
 * in-flight request: a new call aborts the previous one, so whatever the
 * user asked for last is what lands.
 */
export class ApiClient {
  private inflight = new Map<string, AbortController>();

  constructor(private baseUrl: string = "") {}

  private async request(endpoint: string, path: string): Promise<Response> {
    this.inflight.get(endpoint)?.abort();
    const controller = new AbortController();
    this.inflight.set(endpoint, controller);
    try {
      return await fetch(this.baseUrl + path, { signal: controller.signal });
    } finally {
      if (this.inflight.get(endpoint) === controller) {
        this.inflight.delete(endpoint);
      }
    }
  }

  async fetchOperators(): Promise<OperatorInfo[]> {
    const res = await this.request("operators", "/v1/operators");
    if (!res.ok) {
      throw new ApiError(`operator list failed with status ${res.status}`, res.status);
    }
    const body = (await res.json()) as OperatorsResponse;
    return body.operators;
  }

  async fetchHeatmap(operator: string): Promise<HeatmapResult> {
    const res = await this.request(
      "heatmap",
      `/v1/heatmap?operator=${encodeURIComponent(operator)}`,
    );
    if (res.status === 404) {
      return { kind: "no-data" };
    }
    if (!res.ok) {
      throw new ApiError(`heatmap failed with status ${res.status}`, res.status);
    }
    return { kind: "ok", doc: (await res.json()) as HeatmapDocument };
  }

  async fetchNearestStrong(
    operator: string,
    position: GeoPosition,
    rssiDbm: number,
  ): Promise<NearestStrongResponse> {
    const params = new URLSearchParams({
      operator,
      lat: String(position.lat),
      lon: String(position.lon),
      rssi_dbm: String(rssiDbm),
    });
    const res = await this.request("nearest-strong", `/v1/nearest-strong?${params}`);
    if (!res.ok) {
      throw new ApiError(`nearest-strong failed with status ${res.status}`, res.status);
    }
    return (await res.json()) as NearestStrongResponse;
  }
}
