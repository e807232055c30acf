import type { HeatmapDocument, NearestStrongResponse, OperatorsResponse } from "../src/types.js";

export const operatorsFixture: OperatorsResponse = {
  operators: [
    { operator: "CarrierA", trained_at: 1700000100.0, k: 5 },
    { operator: "CarrierB", trained_at: 1700000200.0, k: 5 },
  ],
};

function feature(lat: number, lon: number, tag: number, color: string) {
  return {
    type: "Feature" as const,
    geometry: { type: "Point" as const, coordinates: [lon, lat] as [number, number] },
    properties: { strength_tag: tag, mean_rssi_dbm: -80 - tag, sample_count: 3 + tag, color },
  };
}

export const heatmapFixture: HeatmapDocument = {
  type: "FeatureCollection",
  operator: "CarrierA",
  generated_at: 1700000100.0,
  trained_at: 1700000100.0,
  features: [
    feature(48.1, 11.5, 0, "#d73027"),
    feature(48.1005, 11.5005, 1, "#fc8d59"),
    feature(48.101, 11.501, 3, "#91cf60"),
    feature(48.1015, 11.5015, 4, "#1a9850"),
  ],
};

export const nearestFixture: NearestStrongResponse = {
  operator: "CarrierA",
  user_tag: 1,
  candidates: [
    {
      lat: 48.1004,
      lon: 11.5004,
      strength_tag: 4,
      distance_m: 42.25,
      bearing_deg: 31.5,
      source_measurement_count: 6,
      route: {
        waypoints: [
          [48.1, 11.5],
          [48.1001, 11.5001],
          [48.1002, 11.5002],
          [48.1003, 11.5003],
          [48.1004, 11.5004],
        ],
        total_distance_m: 42.25,
      },
    },
    {
      lat: 48.1006,
      lon: 11.5,
      strength_tag: 3,
      distance_m: 66.5,
      bearing_deg: 0,
      source_measurement_count: 2,
      route: {
        waypoints: [
          [48.1, 11.5],
          [48.1002, 11.5],
          [48.1004, 11.5],
          [48.1006, 11.5],
        ],
        total_distance_m: 66.5,
      },
    },
    {
      lat: 48.1,
      lon: 11.5012,
      strength_tag: 2,
      distance_m: 89.125,
      bearing_deg: 90,
      source_measurement_count: 1,
      route: {
        waypoints: [
          [48.1, 11.5],
          [48.1, 11.5012],
        ],
        total_distance_m: 89.125,
      },
    },
  ],
};

export const emptyNearestFixture: NearestStrongResponse = {
  operator: "CarrierA",
  user_tag: 4,
  candidates: [],
};
