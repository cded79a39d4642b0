// Trace responses to plottable per-variable series.

import type { TraceResponse } from "./api.js";

export interface SeriesPoint {
  t: number;
  y: number;
}

export interface Series {
  name: string;
  points: SeriesPoint[];
}

export function toSeries(trace: TraceResponse, variables: string[]): Series[] {
  return variables.map((name) => ({
    name,
    points: trace.points
      .filter((p) => p.env !== undefined && p.env[name] !== undefined)
      .map((p) => ({ t: p.t, y: (p.env as Record<string, number>)[name] })),
  }));
}

export function windowed(series: Series[], w0: number, w1: number): Series[] {
  return series.map((s) => ({
    name: s.name,
    points: s.points.filter((p) => p.t >= w0 && p.t <= w1),
  }));
}

export function extent(series: Series[]): { min: number; max: number } {
  let min = Infinity;
  let max = -Infinity;
  for (const s of series) {
    for (const p of s.points) {
      if (p.y < min) min = p.y;
      if (p.y > max) max = p.y;
    }
  }
  if (min > max) return { min: 0, max: 1 };
  if (min === max) return { min: min - 0.5, max: max + 0.5 };
  return { min, max };
}

export function minValue(series: Series[]): number {
  return extent(series).min;
}
