import { ApiClient, isAbort } from "./api.js";
import { MapView } from "./map.js";
import { Store } from "./state.js";
import type { GeoPosition } from "./types.js";

const LAYOUT = `
  <div class="controls">
    <label>operator
      <select id="operator-select"><option value="">choose an operator</option></select>
    </label>
    <label>lat <input id="lat-input" type="number" step="any"></label>
    <label>lon <input id="lon-input" type="number" step="any"></label>
    <label>rssi dBm <input id="rssi-input" type="number" step="1"></label>
    <button id="locate-button" hidden>use my location</button>
    <button id="find-button">find stronger signal</button>
  </div>
  <div id="error-banner" class="banner" hidden></div>
  <p id="status-message" hidden></p>
  <svg id="map" role="img" aria-label="coverage map"></svg>
  <ol id="candidate-panel"></ol>
`;

/** Wires the page together against the given service client. */
export function initApp(root: HTMLElement, client: ApiClient): void {
  root.innerHTML = LAYOUT;
  const select = root.querySelector("#operator-select") as HTMLSelectElement;
  const latInput = root.querySelector("#lat-input") as HTMLInputElement;
  const lonInput = root.querySelector("#lon-input") as HTMLInputElement;
  const rssiInput = root.querySelector("#rssi-input") as HTMLInputElement;
  const locateButton = root.querySelector("#locate-button") as HTMLButtonElement;
  const findButton = root.querySelector("#find-button") as HTMLButtonElement;
  const banner = root.querySelector("#error-banner") as HTMLElement;
  const status = root.querySelector("#status-message") as HTMLElement;
  const panel = root.querySelector("#candidate-panel") as HTMLOListElement;
  const map = new MapView(root.querySelector("#map") as unknown as SVGSVGElement);
  const store = new Store();

  const showError = (text: string) => {
    banner.textContent = text;
    banner.hidden = false;
  };
  const clearError = () => {
    banner.hidden = true;
  };
  const showStatus = (text: string) => {
    status.textContent = text;
    status.hidden = false;
  };
  const clearStatus = () => {
    status.hidden = true;
  };

  const renderPanel = () => {
    const { candidates, chosenIndex } = store.get();
    panel.replaceChildren();
    if (candidates === null) {
      return;
    }
    candidates.forEach((candidate, index) => {
      const row = document.createElement("li");
      row.className = "candidate-row" + (index === chosenIndex ? " chosen" : "");
      row.setAttribute("data-index", String(index));
      // numbers shown exactly as the API sent them
      row.textContent = `tag ${candidate.strength_tag}, ${candidate.distance_m} m away, bearing ${candidate.bearing_deg}`;
      row.addEventListener("click", () => {
        const current = store.get().chosenIndex;
        const next = current === index ? null : index;
        store.update({ chosenIndex: next });
        map.setRoute(next === null ? null : candidate.route.waypoints);
        renderPanel();
      });
      panel.append(row);
    });
  };

  const loadOperators = async () => {
    try {
      const operators = await client.fetchOperators();
      for (const info of operators) {
        const option = document.createElement("option");
        option.value = info.operator;
        option.textContent = info.operator;
        select.append(option);
      }
    } catch (err) {
      if (isAbort(err)) return;
      showError(`could not list operators: ${(err as Error).message}`);
    }
  };

  const loadHeatmap = async (operator: string) => {
    clearError();
    clearStatus();
    try {
      const result = await client.fetchHeatmap(operator);
      if (result.kind === "no-data") {
        map.setHeatmap([]);
        showStatus(`no data for operator ${operator}`);
        return;
      }
      map.setHeatmap(result.doc.features);
    } catch (err) {
      if (isAbort(err)) return;
      showError(`heatmap request failed: ${(err as Error).message}`);
    }
  };

  const currentPosition = (): GeoPosition | null => {
    const lat = parseFloat(latInput.value);
    const lon = parseFloat(lonInput.value);
    return Number.isFinite(lat) && Number.isFinite(lon) ? { lat, lon } : null;
  };

  const positionEdited = () => {
    const position = currentPosition();
    store.update({ position });
    map.setUser(position);
  };

  const findNearest = async () => {
    clearError();
    clearStatus();
    const operator = store.get().operator;
    const position = store.get().position;
    const rssi = parseFloat(rssiInput.value);
    if (!operator || position === null || !Number.isFinite(rssi)) {
      showStatus("pick an operator and enter position and rssi first");
      return;
    }
    try {
      const response = await client.fetchNearestStrong(operator, position, rssi);
      store.update({ candidates: response.candidates, chosenIndex: null });
      map.setRoute(null);
      renderPanel();
      if (response.candidates.length === 0) {
        showStatus("you are already in the strongest nearby zone");
      }
    } catch (err) {
      if (isAbort(err)) return;
      showError(`nearest-strong request failed: ${(err as Error).message}`);
    }
  };

  select.addEventListener("change", () => {
    const operator = select.value || null;
    store.update({ operator, candidates: null, chosenIndex: null });
    map.setRoute(null);
    renderPanel();
    if (operator) {
      void loadHeatmap(operator);
    } else {
      map.setHeatmap([]);
    }
  });
  latInput.addEventListener("input", positionEdited);
  lonInput.addEventListener("input", positionEdited);
  rssiInput.addEventListener("input", () => {
    const rssi = parseFloat(rssiInput.value);
    store.update({ rssiDbm: Number.isFinite(rssi) ? rssi : null });
  });
  findButton.addEventListener("click", () => void findNearest());

  if (typeof navigator !== "undefined" && navigator.geolocation) {
    locateButton.hidden = false;
    locateButton.addEventListener("click", () => {
      navigator.geolocation.getCurrentPosition(
        (fix) => {
          latInput.value = String(fix.coords.latitude);
          lonInput.value = String(fix.coords.longitude);
          positionEdited();
        },
        () => showError("browser location unavailable"),
      );
    });
  }

  void loadOperators();
}
