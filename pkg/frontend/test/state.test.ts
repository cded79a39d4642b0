import { describe, expect, it } from "vitest";

import {
  decodeState, defaultState, encodeState, evalRequestOf, stepRequestOf,
  traceRequestOf,
} from "../src/state.js";

describe("view state", () => {
  it("round-trips through the URL hash", () => {
    const state = defaultState("x := 1 ; wait 1");
    state.tMax = 7.5;
    state.samples = 321;
    state.window = [1.25, 3.5];
    state.hidden = ["y"];
    state.queryT = 1.5;
    state.stepCursor = 3;
    const back = decodeState(encodeState(state));
    expect(back).toEqual(state);
  });

  it("restored state reproduces identical API requests", () => {
    const state = defaultState("v := 5");
    state.tMax = 12;
    state.samples = 500;
    state.window = [0.8, 1.2];
    const back = decodeState(encodeState(state))!;
    expect(traceRequestOf(back)).toEqual(traceRequestOf(state));
    expect(evalRequestOf(back, 1.5)).toEqual(evalRequestOf(state, 1.5));
    expect(stepRequestOf(back, 0.5)).toEqual(stepRequestOf(state, 0.5));
  });

  it("rejects foreign hashes", () => {
    expect(decodeState("")).toBeNull();
    expect(decodeState("#other")).toBeNull();
    expect(decodeState("#s=%7Bnope")).toBeNull();
  });

  it("full-range trace requests pass through untouched", () => {
    const state = defaultState("v := 5");
    state.tMax = 10;
    state.samples = 500;
    state.window = [0, 10];
    expect(traceRequestOf(state)).toEqual({ source: "v := 5", t_max: 10, samples: 500 });
  });

  it("zoomed windows request finer sampling up to the window edge", () => {
    const state = defaultState("v := 5");
    state.tMax = 10;
    state.samples = 500;
    state.window = [0.9, 1.2];
    const req = traceRequestOf(state);
    expect(req.t_max).toBe(1.2);
    // at least as dense inside the window as the full view was overall
    expect(req.samples / req.t_max).toBeGreaterThan(state.samples / state.tMax);
    expect(req.samples).toBeLessThanOrEqual(100_000);
  });
});
