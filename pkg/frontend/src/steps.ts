// Step-debugger models: rows with per-step environment diffs, and source
// splitting around the active span for highlighting.

import type { Env, StepResponse } from "./api.js";

export interface StepRow {
  index: number;
  rule: string;
  t: number;
  env: Env;
  /** variables whose value changed in this step */
  changed: string[];
  /** a guard was evaluated here (conditional / loop test) */
  guardTick: boolean;
  span: [number, number] | null;
}

const GUARD_RULES = new Set(["if-true", "if-false", "wh-true", "wh-false"]);

export function stepRows(resp: StepResponse, initial: Env): StepRow[] {
  const rows: StepRow[] = [];
  let prev = initial;
  resp.steps.forEach((s, index) => {
    const changed = Object.keys(s.env).filter((k) => s.env[k] !== prev[k]);
    const guardTick = s.rule.split(",").some((r) => GUARD_RULES.has(r));
    rows.push({
      index,
      rule: s.rule,
      t: s.t,
      env: s.env,
      changed,
      guardTick,
      span: s.code_span ?? null,
    });
    prev = s.env;
  });
  return rows;
}

/** Source text split as [before, active, after] for span highlighting. */
export function splitSpan(source: string, span: [number, number] | null): [string, string, string] {
  if (span === null) return [source, "", ""];
  const [start, end] = span;
  if (start < 0 || end > source.length || start > end) return [source, "", ""];
  return [source.slice(0, start), source.slice(start, end), source.slice(end)];
}

export function formatEnv(env: Env, highlight: string[] = []): string {
  return Object.entries(env)
    .map(([k, v]) => `${highlight.includes(k) ? "*" : ""}${k}=${formatNumber(v)}`)
    .join("  ");
}

export function formatNumber(v: number): string {
  if (Number.isInteger(v) && Math.abs(v) < 1e15) return String(v);
  const fixed = v.toPrecision(10);
  return String(Number(fixed));
}
