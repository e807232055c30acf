import type { Candidate, GeoPosition, HeatmapDocument } from "./types.js";

export interface ViewState {
  operator: string | null;
  position: GeoPosition | null;
  rssiDbm: number | null;
  heatmap: HeatmapDocument | null;
  /** null until a nearest-strong call succeeds; then exactly what it returned */
  candidates: Candidate[] | null;
  chosenIndex: number | null;
}

export function initialState(): ViewState {
  return {
    operator: null,
    position: null,
    rssiDbm: null,
    heatmap: null,
    candidates: null,
    chosenIndex: null,
  };
}

/** Minimal observable state holder. */
export class Store {
  private state = initialState();
  private listeners: Array<(s: ViewState) => void> = [];

  get(): ViewState {
    return this.state;
  }

  subscribe(listener: (s: ViewState) => void): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  update(patch: Partial<ViewState>): void {
    const next = { ...this.state, ...patch };
    // a chosen candidate only makes sense inside the current list
    if (
      next.chosenIndex !== null &&
      (next.candidates === null || next.chosenIndex < 0 || next.chosenIndex >= next.candidates.length)
    ) {
      next.chosenIndex = null;
    }
    this.state = next;
    for (const listener of this.listeners) {
      listener(next);
    }
  }
}
