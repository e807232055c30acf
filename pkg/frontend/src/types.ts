/** Response shapes of the four service endpoints, as served. */

export interface GeoPosition {
  lat: number;
  lon: number;
}

export interface HeatmapFeature {
  type: "Feature";
  /** coordinates are [lon, lat] per GeoJSON */
  geometry: { type: "Point"; coordinates: [number, number] };
  properties: {
    strength_tag: number;
    mean_rssi_dbm: number;
    sample_count: number;
    color: string;
  };
}

export interface HeatmapDocument {
  type: "FeatureCollection";
  operator?: string;
  generated_at?: number;
  trained_at?: number;
  features: HeatmapFeature[];
}

export interface RoutePolyline {
  /** waypoints are [lat, lon] pairs, endpoints included */
  waypoints: [number, number][];
  total_distance_m: number;
}

export interface Candidate {
  lat: number;
  lon: number;
  strength_tag: number;
  distance_m: number;
  bearing_deg: number;
  source_measurement_count: number;
  route: RoutePolyline;
}

export interface NearestStrongResponse {
  operator: string;
  user_tag: number;
  candidates: Candidate[];
}

export interface OperatorInfo {
  operator: string;
  trained_at: number;
  k: number;
}

export interface OperatorsResponse {
  operators: OperatorInfo[];
}
