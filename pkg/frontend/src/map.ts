import type { GeoPosition, HeatmapFeature } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const VIEW = 600;
const PAD = 30;
const MIN_SPAN = 1e-4; // degrees; keeps single-point frames projectable

interface Frame {
  minLat: number;
  maxLat: number;
  minLon: number;
  maxLon: number;
}

/**
 * SVG map: colored heatmap markers, a route overlay, a red marker for the
 * user and a green one for the destination. Purely presentational; every
 * attribute comes from API fields, and the projection frame is derived
 * once per heatmap so a position edit repaints nothing but the red marker.
 */
export class MapView {
  private frame: Frame | null = null;
  private markerLayer: SVGGElement;
  private routeLayer: SVGGElement;
  private userMarker: SVGCircleElement;
  private lastUser: GeoPosition | null = null;
  private lastRoute: [number, number][] | null = null;

  constructor(private svg: SVGSVGElement) {
    this.svg.setAttribute("viewBox", `0 0 ${VIEW} ${VIEW}`);
    this.markerLayer = document.createElementNS(SVG_NS, "g");
    this.markerLayer.setAttribute("class", "marker-layer");
    this.routeLayer = document.createElementNS(SVG_NS, "g");
    this.routeLayer.setAttribute("class", "route-layer");
    this.userMarker = document.createElementNS(SVG_NS, "circle");
    this.userMarker.setAttribute("class", "user-marker");
    this.userMarker.setAttribute("r", "7");
    this.userMarker.setAttribute("fill", "#dc2626");
    this.userMarker.setAttribute("display", "none");
    this.svg.append(this.markerLayer, this.routeLayer, this.userMarker);
  }

  setHeatmap(features: HeatmapFeature[]): void {
    this.frame = features.length > 0 ? frameOf(features) : null;
    this.markerLayer.replaceChildren();
    for (const feature of features) {
      const [lon, lat] = feature.geometry.coordinates;
      const { x, y } = this.project(lat, lon);
      const marker = document.createElementNS(SVG_NS, "circle");
      marker.setAttribute("class", "heatmap-marker");
      marker.setAttribute("cx", String(x));
      marker.setAttribute("cy", String(y));
      marker.setAttribute("r", "5");
      // server decides the color; passed through untouched
      marker.setAttribute("fill", feature.properties.color);
      marker.setAttribute("data-tag", String(feature.properties.strength_tag));
      const title = document.createElementNS(SVG_NS, "title");
      title.textContent = `tag ${feature.properties.strength_tag}, mean ${feature.properties.mean_rssi_dbm} dBm, ${feature.properties.sample_count} samples`;
      marker.append(title);
      this.markerLayer.append(marker);
    }
    // reproject retained overlays onto the new frame
    this.setUser(this.lastUser);
    this.setRoute(this.lastRoute);
  }

  /** Moves (or hides) the red marker and touches nothing else. */
  setUser(position: GeoPosition | null): void {
    this.lastUser = position;
    if (position === null) {
      this.userMarker.setAttribute("display", "none");
      return;
    }
    const { x, y } = this.project(position.lat, position.lon);
    this.userMarker.removeAttribute("display");
    this.userMarker.setAttribute("cx", String(x));
    this.userMarker.setAttribute("cy", String(y));
  }

  /** Draws the chosen route and its green destination marker, or clears both. */
  setRoute(waypoints: [number, number][] | null): void {
    this.lastRoute = waypoints;
    this.routeLayer.replaceChildren();
    if (waypoints === null || waypoints.length === 0) {
      return;
    }
    const line = document.createElementNS(SVG_NS, "polyline");
    line.setAttribute("class", "route-line");
    line.setAttribute(
      "points",
      waypoints.map(([lat, lon]) => {
        const { x, y } = this.project(lat, lon);
        return `${x},${y}`;
      }).join(" "),
    );
    line.setAttribute("fill", "none");
    line.setAttribute("stroke", "#1d4ed8");
    line.setAttribute("stroke-width", "3");
    const [destLat, destLon] = waypoints[waypoints.length - 1];
    const { x, y } = this.project(destLat, destLon);
    const destination = document.createElementNS(SVG_NS, "circle");
    destination.setAttribute("class", "destination-marker");
    destination.setAttribute("cx", String(x));
    destination.setAttribute("cy", String(y));
    destination.setAttribute("r", "7");
    destination.setAttribute("fill", "#16a34a");
    this.routeLayer.append(line, destination);
  }

  private project(lat: number, lon: number): { x: number; y: number } {
    const frame = this.frame ?? {
      minLat: lat - MIN_SPAN,
      maxLat: lat + MIN_SPAN,
      minLon: lon - MIN_SPAN,
      maxLon: lon + MIN_SPAN,
    };
    const spanLat = Math.max(frame.maxLat - frame.minLat, MIN_SPAN);
    const spanLon = Math.max(frame.maxLon - frame.minLon, MIN_SPAN);
    const inner = VIEW - 2 * PAD;
    return {
      x: PAD + ((lon - frame.minLon) / spanLon) * inner,
      // latitude grows upward, SVG y grows downward
      y: PAD + ((frame.maxLat - lat) / spanLat) * inner,
    };
  }
}

function frameOf(features: HeatmapFeature[]): Frame {
  let minLat = Infinity;
  let maxLat = -Infinity;
  let minLon = Infinity;
  let maxLon = -Infinity;
  for (const feature of features) {
    const [lon, lat] = feature.geometry.coordinates;
    minLat = Math.min(minLat, lat);
    maxLat = Math.max(maxLat, lat);
    minLon = Math.min(minLon, lon);
    maxLon = Math.max(maxLon, lon);
  }
  return { minLat, maxLat, minLon, maxLon };
}
