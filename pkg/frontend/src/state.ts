// Shareable view state: everything needed to reproduce a session lives in
// the URL hash, and the API requests a view issues are pure functions of it,
// so restoring a hash replays identical requests.

import type { EvalRequest, TraceRequest } from "./api.js";

export interface ViewState {
  source: string;
  tMax: number;
  samples: number;
  /** visible time window [w0, w1]; equals [0, tMax] when not zoomed */
  window: [number, number];
  hidden: string[]; // variables toggled off in the plot
  queryT: number | null;
  stepCursor: number;
}

export function defaultState(source = ""): ViewState {
  return {
    source,
    tMax: 10,
    samples: 500,
    window: [0, 10],
    hidden: [],
    queryT: null,
    stepCursor: 0,
  };
}

export function encodeState(state: ViewState): string {
  return "#s=" + encodeURIComponent(JSON.stringify(state));
}

export function decodeState(hash: string): ViewState | null {
  if (!hash.startsWith("#s=")) return null;
  try {
    const raw = JSON.parse(decodeURIComponent(hash.slice(3)));
    if (typeof raw.source !== "string" || typeof raw.tMax !== "number") return null;
    const base = defaultState(raw.source);
    return { ...base, ...raw };
  } catch {
    return null;
  }
}

/**
 * The /trace request for the current window. The endpoint always samples
 * from 0, so zooming keeps t_max at the window's right edge and raises the
 * sample count until the visible part is at least as dense as a full-range
 * view; the chart drops points left of the window.
 */
export function traceRequestOf(state: ViewState): TraceRequest {
  const [w0, w1] = state.window;
  const zoomed = w0 > 0 || w1 < state.tMax;
  if (!zoomed) {
    return { source: state.source, t_max: state.tMax, samples: state.samples };
  }
  const width = Math.max(w1 - w0, 1e-9);
  const wanted = Math.ceil((state.samples * w1) / width);
  return {
    source: state.source,
    t_max: w1,
    samples: Math.min(100_000, Math.max(state.samples, wanted)),
  };
}

export function evalRequestOf(state: ViewState, t: number): EvalRequest {
  return { source: state.source, t };
}

export function stepRequestOf(state: ViewState, t: number) {
  return { source: state.source, t, max_steps: 500 };
}
